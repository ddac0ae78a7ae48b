/** DOM wiring for the annotation UI.
 *
 * Keyboard-first labeling: digits pick the pertinence class (V2),
 * letters toggle categories/tags, Enter submits. Submissions advance
 * the queue optimistically; the offline queue owns delivery and the
 * status line reflects acknowledgment. Records the server rejects are
 * surfaced inline and their term returns to the front of the queue.
 */

import { ApiClient } from "./api.js";
import { MemoryStorage, OfflineQueue, QueueStorage } from "./queue.js";
import { LabelSession } from "./session.js";
import type { Category, LabelRecord, Manifest, V2Class } from "./types.js";
import { CATEGORIES, V2_CLASSES } from "./types.js";

export interface AppOptions {
  storage?: QueueStorage;
  subsetSize?: number;
}

export interface AppHandle {
  start(raterId: string): Promise<void>;
  session(): LabelSession | null;
  queue(): OfflineQueue;
  flushQueue(): Promise<void>;
  showAgreement(): Promise<void>;
  handleKey(key: string): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  if (text !== undefined) node.textContent = text;
  return node;
}

const CLASS_KEYS: Record<string, V2Class> = {
  "1": "VeryPertinent",
  "2": "Pertinent",
  "3": "Irrelevant",
};
const TAG_KEYS: Record<string, Category> = { o: "OWT", t: "TM", a: "AV" };

export function createApp(
  root: HTMLElement,
  api: ApiClient,
  options: AppOptions = {},
): AppHandle {
  let manifest: Manifest | null = null;
  let session: LabelSession | null = null;
  const queue = new OfflineQueue(
    (record: LabelRecord) => api.postLabel(record),
    options.storage ?? new MemoryStorage(),
  );

  root.innerHTML = "";
  const banner = el("div", { id: "error-banner", class: "banner hidden" });
  const loginView = el("div", { id: "login-view" });
  const labelView = el("div", { id: "label-view", class: "hidden" });
  const agreementView = el("div", { id: "agreement-view", class: "hidden" });
  const statusLine = el("div", { id: "queue-status" }, "idle");
  const guidelines = el("aside", { id: "guidelines" });
  const main = el("main");
  main.append(banner, loginView, labelView, agreementView, statusLine);
  root.append(main, guidelines);

  // --- login -----------------------------------------------------------
  const raterInput = el("input", {
    id: "rater-input",
    placeholder: "rater id",
    autocomplete: "off",
  });
  const startBtn = el("button", { id: "start-btn" }, "Start labeling");
  loginView.append(el("h1", {}, "Term annotation"), raterInput, startBtn);
  startBtn.addEventListener("click", () => {
    void start(raterInput.value.trim());
  });

  function showError(message: string | null): void {
    if (message === null) {
      banner.classList.add("hidden");
      banner.textContent = "";
    } else {
      banner.classList.remove("hidden");
      banner.textContent = message;
    }
  }

  function setStatus(text: string): void {
    statusLine.textContent = text;
  }

  // --- labeling --------------------------------------------------------
  async function start(raterId: string): Promise<void> {
    if (!raterId) {
      showError("enter a rater id first");
      return;
    }
    try {
      manifest = await api.getManifest();
      const unlabeled = await api.getUnlabeledTerms(raterId);
      session = new LabelSession(raterId, manifest.schema, unlabeled);
    } catch (error) {
      showError(`cannot start session: ${(error as Error).message}`);
      return;
    }
    showError(null);
    loginView.classList.add("hidden");
    void loadGuidelines();
    renderLabelView();
  }

  function renderLabelView(): void {
    if (!session || !manifest) return;
    const term = session.currentTerm();
    labelView.classList.remove("hidden");
    labelView.innerHTML = "";

    const labeled = manifest.size - session.remaining();
    labelView.append(
      el(
        "div",
        { id: "progress-text" },
        `${session.raterId}: ${labeled} / ${manifest.size} labeled`,
      ),
    );

    if (term === null) {
      labelView.append(el("p", { id: "done-text" }, "All terms labeled."));
      const panelBtn = el("button", { id: "agreement-btn" }, "Show agreement");
      panelBtn.addEventListener("click", () => void showAgreement());
      labelView.append(panelBtn);
      return;
    }

    labelView.append(el("h2", { id: "term-text" }, term));

    if (session.schema === "V2") {
      const classRow = el("div", { class: "row", id: "class-row" });
      for (const cls of V2_CLASSES) {
        const pressed = session.draft.v2Class === cls;
        const btn = el(
          "button",
          { id: `class-${cls}`, "aria-pressed": String(pressed) },
          cls,
        );
        btn.addEventListener("click", () => {
          session!.setClass(cls);
          renderLabelView();
        });
        classRow.append(btn);
      }
      labelView.append(classRow);

      const tagRow = el("div", { class: "row", id: "tag-row" });
      const disabled = session.tagsDisabled();
      for (const tag of CATEGORIES) {
        const pressed = session.draft.tags.includes(tag);
        const attrs: Record<string, string> = {
          id: `tag-${tag}`,
          "aria-pressed": String(pressed),
        };
        if (disabled) attrs.disabled = "disabled";
        const btn = el("button", attrs, tag);
        btn.addEventListener("click", () => {
          session!.toggleTag(tag);
          renderLabelView();
        });
        tagRow.append(btn);
      }
      labelView.append(tagRow);
      labelView.append(
        el("p", { class: "hint" }, "keys: 1/2/3 class, o/t/a tags, Enter submit"),
      );
    } else {
      const catRow = el("div", { class: "row", id: "cat-row" });
      for (const cat of CATEGORIES) {
        const pressed = session.draft.categories.includes(cat);
        const btn = el(
          "button",
          { id: `cat-${cat}`, "aria-pressed": String(pressed) },
          cat,
        );
        btn.addEventListener("click", () => {
          session!.toggleCategory(cat);
          renderLabelView();
        });
        catRow.append(btn);
      }
      const noneBtn = el(
        "button",
        { id: "cat-None", "aria-pressed": String(session.draft.none) },
        "None",
      );
      noneBtn.addEventListener("click", () => {
        session!.toggleNone();
        renderLabelView();
      });
      catRow.append(noneBtn);
      labelView.append(catRow);
      labelView.append(
        el("p", { class: "hint" }, "keys: o/t/a categories, n None, Enter submit"),
      );
    }

    const submitAttrs: Record<string, string> = { id: "submit-btn" };
    if (!session.canSubmit()) submitAttrs.disabled = "disabled";
    const submitBtn = el("button", submitAttrs, "Submit");
    submitBtn.addEventListener("click", () => submitCurrent());
    labelView.append(submitBtn);
  }

  function submitCurrent(): void {
    if (!session || !session.canSubmit()) return;
    const record = session.buildRecord();
    queue.enqueue(record); // persisted before any network traffic
    session.advance();
    renderLabelView();
    void flushQueue();
  }

  async function flushQueue(): Promise<void> {
    const result = await queue.flush();
    for (const rejected of result.rejected) {
      // the server refused the record: put the term back and tell the rater
      session?.requeue(rejected.record.term);
      showError(
        `"${rejected.record.term}" was rejected: ${rejected.detail}. ` +
          "Please label it again.",
      );
      renderLabelView();
    }
    if (result.remaining > 0) {
      setStatus(`offline: ${result.remaining} submission(s) queued`);
    } else {
      setStatus("all submissions acknowledged");
    }
  }

  // --- agreement panel ---------------------------------------------------
  async function showAgreement(): Promise<void> {
    if (!manifest) return;
    agreementView.classList.remove("hidden");
    agreementView.innerHTML = "";
    agreementView.append(el("h2", {}, "Agreement"));

    let progress;
    try {
      progress = await api.getProgress();
    } catch (error) {
      agreementView.append(
        el("p", { id: "agreement-status" }, `progress unavailable: ${(error as Error).message}`),
      );
      return;
    }
    const bars = el("ul", { id: "progress-list" });
    for (const [rater, count] of Object.entries(progress.raters).sort()) {
      bars.append(el("li", {}, `${rater}: ${count} / ${progress.total}`));
    }
    agreementView.append(bars);

    const mapping =
      manifest.schema === "V2" ? "V2_three_class" : "V1_primary_category";
    const raterCount = Object.keys(progress.raters).length;
    const wanted = options.subsetSize ?? 3;
    const subsetSize = raterCount >= wanted ? wanted : undefined;
    try {
      const response = await api.getAgreement(mapping, subsetSize);
      if (response.status === "incomplete") {
        const counts = Object.entries(response.raters)
          .sort()
          .map(([rater, count]) => `${rater} ${count}/${response.total}`)
          .join(", ");
        agreementView.append(
          el("p", { id: "agreement-status" }, `awaiting raters: ${counts}`),
        );
        return;
      }
      agreementView.append(
        el(
          "p",
          { id: "agreement-kappa" },
          `Fleiss kappa (${mapping}, all raters): ${response.result.kappa.toFixed(4)}`,
        ),
      );
      if (response.result.best_subset) {
        const best = response.result.best_subset;
        agreementView.append(
          el(
            "p",
            { id: "best-subset" },
            `best ${best.raters.length}-rater subset ` +
              `(${best.raters.join(", ")}): ${best.kappa.toFixed(4)}`,
          ),
        );
      }
    } catch (error) {
      agreementView.append(
        el("p", { id: "agreement-status" }, `agreement unavailable: ${(error as Error).message}`),
      );
    }
  }

  async function loadGuidelines(): Promise<void> {
    guidelines.innerHTML = "";
    guidelines.append(el("h3", {}, "Annotation guide"));
    try {
      const response = await fetch("/guidelines.json");
      if (!response.ok) throw new Error(String(response.status));
      const body = await response.json();
      for (const entry of body.categories ?? []) {
        guidelines.append(el("h4", {}, `${entry.key}: ${entry.label}`));
        guidelines.append(el("p", {}, entry.definition));
      }
      for (const entry of body.classes ?? []) {
        guidelines.append(el("h4", {}, entry.key));
        guidelines.append(el("p", {}, entry.definition));
      }
    } catch {
      guidelines.append(
        el("p", {}, "Guidelines file not available; ask the campaign owner."),
      );
    }
  }

  function handleKey(key: string): void {
    if (!session || session.currentTerm() === null) return;
    if (session.schema === "V2") {
      if (key in CLASS_KEYS) {
        session.setClass(CLASS_KEYS[key]);
        renderLabelView();
        return;
      }
      if (key in TAG_KEYS) {
        session.toggleTag(TAG_KEYS[key]);
        renderLabelView();
        return;
      }
    } else {
      if (key in TAG_KEYS) {
        session.toggleCategory(TAG_KEYS[key]);
        renderLabelView();
        return;
      }
      if (key === "n") {
        session.toggleNone();
        renderLabelView();
        return;
      }
    }
    if (key === "Enter") submitCurrent();
  }

  document.addEventListener("keydown", (event) => {
    if (event.target instanceof HTMLInputElement) return;
    handleKey(event.key);
  });

  return {
    start,
    session: () => session,
    queue: () => queue,
    flushQueue,
    showAgreement,
    handleKey,
  };
}
