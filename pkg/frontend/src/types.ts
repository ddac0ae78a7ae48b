/** Wire types shared with the annotation service. */

export type Schema = "V1" | "V2";
export type Category = "OWT" | "TM" | "AV";
export type V2Class = "VeryPertinent" | "Pertinent" | "Irrelevant";

export const CATEGORIES: Category[] = ["OWT", "TM", "AV"];
export const V2_CLASSES: V2Class[] = ["VeryPertinent", "Pertinent", "Irrelevant"];

export interface Manifest {
  sample_id: string;
  seed: number;
  size: number;
  ranking_digest: string;
  terms: string[];
  schema: Schema;
}

export interface V1Record {
  rater_id: string;
  term: string;
  schema: "V1";
  categories: string[]; // ordered; ["None"] is the exclusive non-label
}

export interface V2Record {
  rater_id: string;
  term: string;
  schema: "V2";
  class: V2Class;
  tags: Category[]; // empty exactly when class is Irrelevant
}

export type LabelRecord = V1Record | V2Record;

export interface ProgressInfo {
  total: number;
  raters: Record<string, number>;
}

export interface SubsetKappa {
  raters: string[];
  kappa: number;
}

export interface AgreementResult {
  kappa: number;
  report: Record<string, unknown>;
  subsets?: SubsetKappa[];
  best_subset?: SubsetKappa;
}

export type AgreementResponse =
  | { status: "ok"; result: AgreementResult }
  | { status: "incomplete"; total: number; raters: Record<string, number> };
