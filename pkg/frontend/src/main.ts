/** Browser entry point: wires the session, renderers, and keyboard onto the DOM. */

import { ApiClient, ApiError, OfflineError } from "./api";
import { makeKeydownHandler } from "./keyboard";
import {
  renderAgreement,
  renderInstance,
  renderLabelPanel,
  renderOfflineBanner,
  renderProgress,
} from "./render";
import { AnnotationSession } from "./session";

const app = document.getElementById("app");
if (!app) throw new Error("missing #app container");

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

async function boot(): Promise<void> {
  const api = new ApiClient("");

  let annotator = localStorage.getItem("csmotive.annotator") ?? "";
  while (!annotator) {
    annotator = window.prompt("Annotator id:")?.trim() ?? "";
  }
  localStorage.setItem("csmotive.annotator", annotator);

  const schema = await api.getSchema();
  const session = new AnnotationSession(api, schema, annotator, {
    confirmNoLabel: () =>
      window.confirm("Submit with no labels? (legal for switches outside the scheme)"),
    confirmDiscard: () => window.confirm("Discard unsaved label changes?"),
  });

  app!.innerHTML = `
    <header>
      <h1>csmotive annotation</h1>
      <span id="annotator-badge">${annotator}</span>
      <div id="progress-slot"></div>
    </header>
    <div id="banner-slot"></div>
    <main>
      <div id="instance-slot"></div>
      <div id="labels-slot"></div>
      <div class="actions">
        <button id="btn-previous">← Previous</button>
        <button id="btn-submit">Submit & next</button>
        <button id="btn-next">Next →</button>
      </div>
      <div id="status-slot"></div>
      <section id="agreement-section">
        <h2>Agreement</h2>
        <label>vs <input id="agreement-peer" placeholder="other annotator"></label>
        <label>subset <input id="agreement-subset" placeholder="subset name"></label>
        <button id="btn-agreement">Load</button>
        <div id="agreement-slot"></div>
      </section>
    </main>`;

  const redraw = () => {
    const { index, total } = session.queuePosition;
    if (session.instance) {
      el("instance-slot").innerHTML =
        `<div class="position">instance ${index + 1} of ${total}</div>` +
        renderInstance(session.instance);
      const selected = new Set(session.labelKeys.filter((key) => session.isSet(key)));
      el("labels-slot").innerHTML = renderLabelPanel(schema, selected);
      for (const button of el("labels-slot").querySelectorAll<HTMLButtonElement>(".label-toggle")) {
        button.addEventListener("click", () => {
          session.toggle(button.dataset.key ?? "");
          redraw();
        });
      }
    } else {
      el("instance-slot").innerHTML = "<p>Queue is empty.</p>";
      el("labels-slot").innerHTML = "";
    }
  };

  const status = (message: string, isError = false) => {
    el("status-slot").innerHTML = message
      ? `<div class="status${isError ? " error" : ""}">${message}</div>`
      : "";
  };

  const refreshProgress = async () => {
    try {
      el("progress-slot").innerHTML = renderProgress(await api.getProgress(annotator));
    } catch {
      // progress is cosmetic; never block annotation on it
    }
  };

  const guard = async (action: () => Promise<unknown>) => {
    el("banner-slot").innerHTML = "";
    try {
      await action();
      status("");
    } catch (error) {
      if (error instanceof OfflineError) {
        el("banner-slot").innerHTML = renderOfflineBanner();
      } else if (error instanceof ApiError) {
        status(`Server rejected the request (${error.status}): ${error.detail} — fix and retry.`, true);
      } else {
        throw error;
      }
    }
    redraw();
    void refreshProgress();
  };

  el("btn-next").addEventListener("click", () => void guard(() => session.next()));
  el("btn-previous").addEventListener("click", () => void guard(() => session.previous()));
  el("btn-submit").addEventListener("click", () => void guard(() => session.submitAndAdvance()));
  el("btn-agreement").addEventListener("click", () =>
    void guard(async () => {
      const peer = (el("agreement-peer") as HTMLInputElement).value.trim();
      const subset = (el("agreement-subset") as HTMLInputElement).value.trim();
      const response = await api.getAgreement(annotator, peer, subset);
      el("agreement-slot").innerHTML = renderAgreement(response, schema);
    }),
  );

  document.addEventListener(
    "keydown",
    makeKeydownHandler({
      onToggle: (labelIndex) => {
        const key = session.labelKeys[labelIndex];
        if (key) {
          session.toggle(key);
          redraw();
        }
      },
      onNext: () => void guard(() => session.next()),
      onPrevious: () => void guard(() => session.previous()),
      onSubmit: () => void guard(() => session.submitAndAdvance()),
    }),
  );

  window.addEventListener("beforeunload", (event) => {
    if (session.dirty) event.preventDefault();
  });

  await guard(() => session.loadQueue());
}

void boot();
