/** Wire types shared with the annotation service. */
export const CATEGORIES = ["OWT", "TM", "AV"];
export const V2_CLASSES = ["VeryPertinent", "Pertinent", "Irrelevant"];
