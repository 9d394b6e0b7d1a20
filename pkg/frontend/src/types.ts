/** Wire-level names and shapes of the search service.
 *
 * Names must match the server byte-for-byte; the UI builds its menus from
 * these constants and never invents or renames kinds.
 */

export const SIMILARITY_KINDS = ["dot", "hi", "nhi", "nc", "minmax"] as const;
export type SimilarityKind = (typeof SIMILARITY_KINDS)[number];

export const EARLY_FUSION_KINDS = ["sum", "average", "maximum"] as const;
export const LATE_IMAGE_FUSION_KINDS = [
  "max_sim",
  "weighted_sim",
  "count",
  "highest_rank",
  "rank_sum",
] as const;
export const LATE_SET_FUSION_KINDS = [
  "set_max",
  "set_average",
  "set_weighted_average",
  "set_average_max",
  "set_weighted_average_max",
] as const;

/** The 13 fusion kinds a multi-view session can request. */
export const FUSION_KINDS = [
  ...EARLY_FUSION_KINDS,
  ...LATE_IMAGE_FUSION_KINDS,
  ...LATE_SET_FUSION_KINDS,
] as const;
export type FusionKind = (typeof FUSION_KINDS)[number];

/** Single-view queries send fusion "none". */
export const FUSION_NONE = "none" as const;
export type FusionChoice = FusionKind | typeof FUSION_NONE;

export interface SessionSpec {
  similarity: SimilarityKind;
  fusion: FusionChoice;
  k: number;
  list_depth: number;
}

/** One ranked result; `score` keeps the wire's 6-decimal string verbatim. */
export interface ResultItem {
  object_id: string;
  category: string;
  score: string;
}

export interface IndexStatus {
  objects: number;
  views: number;
  vocab_bins: number;
}

export interface ObjectInfo {
  object_id: string;
  category: string;
  views: { view_id: string; source: string }[];
}

export type ViewStatus = "pending" | "accepted" | "error";

/** Client-side record of one uploaded view. */
export interface ViewState {
  name: string;
  status: ViewStatus;
  ordinal?: number;
  detail?: string;
}

/** Mirror of one server session plus its latest results. */
export interface SessionView {
  id: string;
  spec: SessionSpec;
  views: ViewState[];
  results: ResultItem[] | null;
}
