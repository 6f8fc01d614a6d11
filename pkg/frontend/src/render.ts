/** Pure HTML renderers; no state, no API calls, no recomputation.
 *
 * Everything numeric shown here arrives precomputed from the server; the
 * renderers only format. Keeping them string → string makes the contract
 * suite runnable headlessly.
 */

import type {
  AgreementResponse,
  InstanceJson,
  ProgressResponse,
  Schema,
} from "./types";

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

const LANG_CLASS: Record<string, string> = {
  eng: "lang-eng",
  spa: "lang-spa",
  hin: "lang-hin",
  ambiguous: "lang-amb",
  other: "lang-other",
};

/** Context lines with speaker codes, language coloring, and switch markers. */
export function renderInstance(instance: InstanceJson): string {
  const markers = new Set(instance.switch_points.map(([utt, tok]) => `${utt}:${tok}`));
  const lines = instance.context.map((utt, uttOffset) => {
    const isFocus = utt.line_no === instance.focus_line;
    const tokens = utt.tokens
      .map((token, tokenIdx) => {
        const marker = markers.has(`${uttOffset}:${tokenIdx}`)
          ? '<span class="switch-marker" title="switch point">⟫</span>'
          : "";
        const cls = LANG_CLASS[token.lang] ?? "lang-other";
        const explicit = token.explicit ? " explicit" : "";
        return `${marker}<span class="token ${cls}${explicit}">${escapeHtml(token.text)}</span>`;
      })
      .join(" ");
    return (
      `<div class="utterance${isFocus ? " focus" : ""}" data-line="${utt.line_no}">` +
      `<span class="speaker">${escapeHtml(utt.speaker)}</span>${tokens}</div>`
    );
  });
  return `<div class="context" data-instance="${escapeHtml(instance.id)}">${lines.join("")}</div>`;
}

export const SHORTCUT_KEYS = ["1", "2", "3", "4", "5", "6", "7", "8", "9", "0", "-"];

/** Label toggle panel in schema order; definitions become tooltips. */
export function renderLabelPanel(schema: Schema, selected: ReadonlySet<string>): string {
  const buttons = schema.labels
    .map((label, index) => {
      const key = SHORTCUT_KEYS[index] ?? "";
      const on = selected.has(label.key);
      return (
        `<button class="label-toggle${on ? " on" : ""}" data-key="${label.key}" ` +
        `title="${escapeHtml(label.definition)}\nEx: ${escapeHtml(label.example)}" ` +
        `aria-pressed="${on}">` +
        `<kbd>${key}</kbd> ${escapeHtml(label.name)}</button>`
      );
    })
    .join("");
  return `<div class="label-panel">${buttons}</div>`;
}

/** Agreement dashboard: bars show the server's numbers verbatim. */
export function renderAgreement(response: AgreementResponse, schema: Schema): string {
  if (!response.complete) {
    const missing = response.missing?.length ?? 0;
    return (
      `<div class="agreement empty-state">Agreement subset incomplete: ` +
      `${missing} record(s) still missing. Finish annotating the subset to see the table.</div>`
    );
  }
  const rows = schema.labels
    .map((label) => {
      const stats = response.per_label?.[label.key];
      if (!stats) return "";
      const percent = `${(stats.accuracy * 100).toFixed(0)}%`;
      const kappa = stats.kappa === null ? "n/a" : stats.kappa.toFixed(3);
      return (
        `<div class="agreement-row" data-key="${label.key}">` +
        `<span class="agreement-label">${escapeHtml(label.name)}</span>` +
        `<span class="agreement-bar"><span class="agreement-fill" ` +
        `style="width:${(stats.accuracy * 100).toFixed(1)}%"></span></span>` +
        `<span class="agreement-value">${percent}</span>` +
        `<span class="agreement-kappa">κ ${kappa}</span></div>`
      );
    })
    .join("");
  return `<div class="agreement" data-n="${response.n_instances}">${rows}</div>`;
}

export function renderProgress(progress: ProgressResponse): string {
  return (
    `<div class="progress" data-annotator="${escapeHtml(progress.annotator)}">` +
    `${progress.completed} / ${progress.total} annotated, ` +
    `${progress.remaining} remaining</div>`
  );
}

export function renderOfflineBanner(): string {
  return '<div class="offline-banner">Server unreachable — working offline. Retry when the connection is back.</div>';
}
