/** Labeling session state: one rater, one schema, a queue of terms.
 *
 * The draft editing rules enforce the same record invariants the server
 * checks (the server stays the authority): under V1, None excludes the
 * categories and at most three ordered categories are kept; under V2,
 * Irrelevant clears and disables the tags while the other classes
 * require at least one tag before a record can be built.
 */

import type { Category, LabelRecord, Schema, V2Class } from "./types.js";

export interface Draft {
  categories: Category[]; // V1, insertion-ordered
  none: boolean; // V1
  v2Class: V2Class | null; // V2
  tags: Category[]; // V2, canonical order applied when building
}

const TAG_ORDER: Category[] = ["OWT", "TM", "AV"];

function emptyDraft(): Draft {
  return { categories: [], none: false, v2Class: null, tags: [] };
}

export class LabelSession {
  readonly raterId: string;
  readonly schema: Schema;
  private queue: string[];
  submitted = 0;
  draft: Draft = emptyDraft();

  constructor(raterId: string, schema: Schema, unlabeledTerms: string[]) {
    this.raterId = raterId;
    this.schema = schema;
    this.queue = [...unlabeledTerms];
  }

  currentTerm(): string | null {
    return this.queue.length > 0 ? this.queue[0] : null;
  }

  remaining(): number {
    return this.queue.length;
  }

  /** V1: toggle a category; picking one clears None; order is kept. */
  toggleCategory(category: Category): void {
    if (this.schema !== "V1") return;
    this.draft.none = false;
    const index = this.draft.categories.indexOf(category);
    if (index >= 0) {
      this.draft.categories.splice(index, 1);
    } else if (this.draft.categories.length < 3) {
      this.draft.categories.push(category);
    }
  }

  /** V1: None is exclusive; it clears any picked categories. */
  toggleNone(): void {
    if (this.schema !== "V1") return;
    this.draft.none = !this.draft.none;
    if (this.draft.none) this.draft.categories = [];
  }

  /** V2: pick the pertinence class; Irrelevant clears the tags. */
  setClass(v2Class: V2Class): void {
    if (this.schema !== "V2") return;
    this.draft.v2Class = v2Class;
    if (v2Class === "Irrelevant") this.draft.tags = [];
  }

  /** V2: toggle a tag; ignored while the class is Irrelevant. */
  toggleTag(tag: Category): void {
    if (this.schema !== "V2") return;
    if (this.draft.v2Class === "Irrelevant") return;
    const index = this.draft.tags.indexOf(tag);
    if (index >= 0) this.draft.tags.splice(index, 1);
    else this.draft.tags.push(tag);
  }

  tagsDisabled(): boolean {
    return this.schema === "V2" && this.draft.v2Class === "Irrelevant";
  }

  canSubmit(): boolean {
    if (this.currentTerm() === null) return false;
    if (this.schema === "V1") {
      return this.draft.none || this.draft.categories.length > 0;
    }
    if (this.draft.v2Class === null) return false;
    if (this.draft.v2Class === "Irrelevant") return this.draft.tags.length === 0;
    return this.draft.tags.length > 0;
  }

  /** Build the wire record for the current term; throws when invalid. */
  buildRecord(): LabelRecord {
    const term = this.currentTerm();
    if (term === null) throw new Error("no term left to label");
    if (!this.canSubmit()) throw new Error("draft is incomplete");
    if (this.schema === "V1") {
      return {
        rater_id: this.raterId,
        term,
        schema: "V1",
        categories: this.draft.none ? ["None"] : [...this.draft.categories],
      };
    }
    return {
      rater_id: this.raterId,
      term,
      schema: "V2",
      class: this.draft.v2Class as V2Class,
      tags: TAG_ORDER.filter((t) => this.draft.tags.includes(t)),
    };
  }

  /** Advance past the current term and reset the draft. */
  advance(): void {
    if (this.queue.length === 0) return;
    this.queue.shift();
    this.submitted += 1;
    this.draft = emptyDraft();
  }

  /** Put a server-rejected term back at the front for re-labeling. */
  requeue(term: string): void {
    if (this.queue.includes(term)) return;
    this.queue.unshift(term);
    this.submitted = Math.max(0, this.submitted - 1);
    this.draft = emptyDraft();
  }
}
