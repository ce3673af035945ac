/** Wire types of the gateway JSON API.  Field names match the server
 * responses exactly; the console never invents or recomputes numbers. */

export interface ResultEntry {
  rank: number;
  object: number;
  provenance: "exploit" | "explore";
  riv: number;
}

export interface QueryResponse {
  version: number;
  token: string;
  terms: number[];
  results: ResultEntry[];
}

export interface PromotionEvent {
  term_id: number;
  term: string;
  object: number;
}

export interface ClickResponse {
  version: number;
  total: number;
  promoted: PromotionEvent[];
}

export interface TopObjectEntry {
  object: number;
  riv: number;
}

export interface MetricsResponse {
  version: number;
  generator_size: number;
  pool_size: number;
  total_riv: number;
  links: number;
  objects: number;
  top_objects: Record<string, TopObjectEntry[]>;
  /** present only when the gateway was started with a truth graph */
  p?: number;
}

export interface DeconstructResponse {
  version: number;
  removed: number;
}
