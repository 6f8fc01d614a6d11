/** Annotation session state machine.
 *
 * Pure view/submit layer: labels, agreement, and statistics always come
 * from the server. The session only tracks the queue position, the draft
 * toggle state, and whether the draft has unsaved changes.
 */

import type { ApiClient } from "./api";
import type { AnnotationRecordJson, InstanceJson, Schema } from "./types";

/** Async-friendly yes/no prompt; the UI wires these to dialogs. */
export type Confirm = () => boolean | Promise<boolean>;

export interface SessionHooks {
  /** Asked before submitting an empty label set (legal, but deliberate). */
  confirmNoLabel: Confirm;
  /** Asked before navigating away from unsaved toggles. */
  confirmDiscard: Confirm;
}

export type SubmitResult = "submitted" | "cancelled";
export type MoveResult = "moved" | "blocked" | "at-end";

export class AnnotationSession {
  private queue: string[] = [];
  private position = 0;
  private draft = new Set<string>();
  private saved: Record<string, boolean> | null = null;
  instance: InstanceJson | null = null;

  constructor(
    private api: ApiClient,
    readonly schema: Schema,
    readonly annotatorId: string,
    private hooks: SessionHooks,
  ) {}

  get labelKeys(): string[] {
    return this.schema.labels.map((label) => label.key);
  }

  async loadQueue(): Promise<number> {
    const response = await this.api.getQueue(this.annotatorId, "all");
    this.queue = response.instances.map((item) => item.id);
    this.position = 0;
    await this.openCurrent();
    return this.queue.length;
  }

  get currentId(): string | null {
    return this.queue[this.position] ?? null;
  }

  get queuePosition(): { index: number; total: number } {
    return { index: this.position, total: this.queue.length };
  }

  private async openCurrent(): Promise<void> {
    const id = this.currentId;
    if (id === null) {
      this.instance = null;
      this.saved = null;
      this.draft = new Set();
      return;
    }
    const response = await this.api.getInstance(id, this.annotatorId);
    this.instance = response.instance;
    this.saved = response.record ? { ...response.record.labels } : null;
    this.draft = new Set(
      this.saved ? this.labelKeys.filter((key) => this.saved?.[key]) : [],
    );
  }

  toggle(key: string): void {
    if (!this.labelKeys.includes(key)) {
      throw new Error(`unknown label key ${key}`);
    }
    if (this.draft.has(key)) {
      this.draft.delete(key);
    } else {
      this.draft.add(key);
    }
  }

  isSet(key: string): boolean {
    return this.draft.has(key);
  }

  get selectedCount(): number {
    return this.draft.size;
  }

  /** True when the draft differs from what the server has for this annotator. */
  get dirty(): boolean {
    if (this.instance === null) return false;
    const baseline = this.saved;
    if (baseline === null) return this.draft.size > 0;
    return this.labelKeys.some((key) => (baseline[key] ?? false) !== this.draft.has(key));
  }

  /** Submission payload: exactly the schema keys, plus the version handshake. */
  buildRecord(): AnnotationRecordJson {
    if (this.instance === null) throw new Error("no instance open");
    const labels: Record<string, boolean> = {};
    for (const key of this.labelKeys) {
      labels[key] = this.draft.has(key);
    }
    return {
      instance_id: this.instance.id,
      annotator_id: this.annotatorId,
      labels,
      schema_version: this.schema.version,
    };
  }

  /** Submit the draft; an empty label set needs explicit confirmation. */
  async submit(): Promise<SubmitResult> {
    if (this.instance === null) throw new Error("no instance open");
    if (this.draft.size === 0) {
      const confirmed = await this.hooks.confirmNoLabel();
      if (!confirmed) return "cancelled";
    }
    const record = this.buildRecord();
    const stored = await this.api.submitAnnotation(record);
    this.saved = { ...stored.labels };
    return "submitted";
  }

  /** Submit, then advance to the next instance in the queue. */
  async submitAndAdvance(): Promise<SubmitResult> {
    const result = await this.submit();
    if (result === "submitted" && this.position < this.queue.length - 1) {
      this.position += 1;
      await this.openCurrent();
    }
    return result;
  }

  private async move(delta: number): Promise<MoveResult> {
    const target = this.position + delta;
    if (target < 0 || target >= this.queue.length) return "at-end";
    if (this.dirty) {
      const confirmed = await this.hooks.confirmDiscard();
      if (!confirmed) return "blocked";
    }
    this.position = target;
    await this.openCurrent();
    return "moved";
  }

  next(): Promise<MoveResult> {
    return this.move(1);
  }

  previous(): Promise<MoveResult> {
    return this.move(-1);
  }
}
