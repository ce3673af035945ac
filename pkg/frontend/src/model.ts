/** Pure view-model of the console.  Holds everything the page renders:
 * the current query, the presented list, the metrics series and the
 * event log.  No DOM, no network; every number in here was copied
 * verbatim from a gateway response field. */

import type {
  ClickResponse,
  MetricsResponse,
  QueryResponse,
  ResultEntry,
} from "./types.js";

export interface PresentedRow {
  rank: number;
  object: number;
  label: string;
  color: string;
  badge: "Exploit" | "Explore";
  riv: number;
}

export interface SeriesPoint {
  /** gateway state version: the event-count axis of the charts */
  event: number;
  /** wall-clock axis, milliseconds since the first poll */
  wallMs: number;
  generator: number;
  pool: number;
  p: number | null;
  totalRiv: number;
}

export interface LogEvent {
  wallMs: number;
  kind: "query" | "click" | "promotion" | "conflict" | "deconstruct" | "error";
  text: string;
}

/** Objects are opaque ids; give each a stable label and color so a human
 * can tell cards apart.  Plain multiplicative hash onto the hue wheel. */
export function labelFor(object: number): string {
  return `object #${object}`;
}

export function colorFor(object: number): string {
  const hue = (object * 2654435761) % 360;
  return `hsl(${(hue + 360) % 360}, 65%, 55%)`;
}

export class ConsoleModel {
  queryTerms: string[] = [];
  token: string | null = null;
  rows: PresentedRow[] = [];
  series: SeriesPoint[] = [];
  log: LogEvent[] = [];
  lastReward: number | null = null;
  banner: string | null = null;
  /** set by a 409: the presentation on screen is no longer clickable */
  mustRequery = false;
  private mutationInFlight = false;

  /** Terms are whitespace-separated; submit stays disabled for empty or
   * duplicate input (the gateway would reject duplicates anyway). */
  parseTerms(text: string): string[] {
    return text.split(/\s+/).filter((t) => t.length > 0);
  }

  canSubmit(text: string): boolean {
    const terms = this.parseTerms(text);
    return terms.length > 0 && new Set(terms).size === terms.length;
  }

  /** At most one mutation request may be in flight.  Returns false when
   * one already is; callers must then drop the action on the floor. */
  beginMutation(): boolean {
    if (this.mutationInFlight) return false;
    this.mutationInFlight = true;
    return true;
  }

  endMutation(): void {
    this.mutationInFlight = false;
  }

  /** Render a query response.  Rows mirror `results` in order; rank,
   * riv and provenance are taken verbatim from the payload. */
  showQuery(terms: string[], resp: QueryResponse, wallMs: number): void {
    this.queryTerms = [...terms];
    this.token = resp.token;
    this.rows = resp.results.map((entry: ResultEntry) => ({
      rank: entry.rank,
      object: entry.object,
      label: labelFor(entry.object),
      color: colorFor(entry.object),
      badge: entry.provenance === "exploit" ? "Exploit" : "Explore",
      riv: entry.riv,
    }));
    this.lastReward = null;
    this.banner = null;
    this.mustRequery = false;
    this.log.push({
      wallMs,
      kind: "query",
      text: `query [${terms.join(" ")}] -> ${resp.results.length} results (v${resp.version})`,
    });
  }

  showClick(object: number, resp: ClickResponse, wallMs: number): void {
    this.lastReward = resp.total;
    this.log.push({
      wallMs,
      kind: "click",
      text: `click ${labelFor(object)}: reward ${resp.total.toFixed(1)} (v${resp.version})`,
    });
    for (const promo of resp.promoted) {
      this.log.push({
        wallMs,
        kind: "promotion",
        text: `promoted: "${promo.term}" x ${labelFor(promo.object)} left the generator`,
      });
    }
  }

  /** A 409 means the click raced a newer presentation; nothing changed
   * server-side, so nothing changes here except the prompt to re-query. */
  showConflict(message: string, wallMs: number): void {
    this.banner = `state unchanged: ${message}`;
    this.mustRequery = true;
    this.log.push({ wallMs, kind: "conflict", text: message });
  }

  showError(message: string, wallMs: number): void {
    this.banner = message;
    this.log.push({ wallMs, kind: "error", text: message });
  }

  showDeconstruct(object: number, removed: number, wallMs: number): void {
    this.log.push({
      wallMs,
      kind: "deconstruct",
      text: `deconstructed ${labelFor(object)}: ${removed} links removed`,
    });
  }

  /** Append one metrics poll.  Failed polls are simply skipped by the
   * caller; the series never fabricates points it did not observe. */
  showMetrics(m: MetricsResponse, wallMs: number): void {
    this.series.push({
      event: m.version,
      wallMs,
      generator: m.generator_size,
      pool: m.pool_size,
      p: m.p ?? null,
      totalRiv: m.total_riv,
    });
  }
}
