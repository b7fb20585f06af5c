/** Wire types, mirroring the query service's JSON exactly. */

export interface Citation {
  source_id: string;
  citation: string;
  original_spelling: string;
}

export interface Equivalent {
  normalized_form: string;
  display_form: string;
  count: number;
  citations: Citation[];
}

export interface SenseBucket {
  sense_id: string | null;
  ordinal: number | null;
  gloss: string;
  domain_tag: string | null;
  instance_count: number;
  equivalents: Equivalent[];
}

export interface Candidate {
  term_group_id: string;
  display_form: string;
  match_kind: "exact" | "containment" | "fuzzy";
  edit_distance: number;
  member_count: number;
}

export interface MatchedGroup {
  term_group_id: string;
  canonical_key: string;
  display_form: string;
  lang: string;
  member_count: number;
}

export interface QueryResult {
  query: string;
  lang: string;
  approximate: boolean;
  matched_group: MatchedGroup | null;
  candidates: Candidate[];
  senses: SenseBucket[];
  recommendation: string | null;
  timing_ms: number;
}

export interface DetailEntry {
  entry_id: string;
  source_term: string;
  target_term: string;
  definition: string | null;
  sense: { sense_id: string; gloss: string; domain_tag: string | null } | "unassigned";
  source: { source_id: string; title: string; citation: string };
}

export interface TermDetail {
  term_group_id: string;
  canonical_key: string;
  display_form: string;
  lang: string;
  member_count: number;
  entries: DetailEntry[];
}

export interface ApiError {
  error: string;
  message: string;
}
