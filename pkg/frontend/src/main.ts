/** DOM wiring.  All state lives in ConsoleModel; this file only moves
 * bytes between the model, the GatewayClient and the page. */

import { GatewayClient, GatewayError } from "./api.js";
import { ConsoleModel } from "./model.js";
import { linePath, seriesBounds } from "./chart.js";

const POLL_MS = 1000;
const CHART_W = 560;
const CHART_H = 120;

const client = new GatewayClient("");
const model = new ConsoleModel();
const session = `console-${Math.random().toString(36).slice(2, 10)}`;
const t0 = Date.now();

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const banner = el<HTMLDivElement>("banner");
const queryInput = el<HTMLInputElement>("query-input");
const submitBtn = el<HTMLButtonElement>("submit-btn");
const resultsDiv = el<HTMLDivElement>("results");
const rewardDiv = el<HTMLDivElement>("reward");
const deconstructInput = el<HTMLInputElement>("deconstruct-input");
const deconstructBtn = el<HTMLButtonElement>("deconstruct-btn");
const sizesSvg = el<HTMLElement>("chart-sizes");
const pSvg = el<HTMLElement>("chart-p");
const axisCaption = el<HTMLDivElement>("axis-caption");
const logList = el<HTMLUListElement>("log");

function now(): number {
  return Date.now() - t0;
}

// ---------------------------------------------------------------- render

function renderBanner(): void {
  banner.textContent = model.banner ?? "";
  banner.style.display = model.banner ? "block" : "none";
}

function renderResults(): void {
  resultsDiv.innerHTML = "";
  for (const row of model.rows) {
    const card = document.createElement("div");
    card.className = "card";
    const swatch = document.createElement("span");
    swatch.className = "swatch";
    swatch.style.background = row.color;
    const text = document.createElement("span");
    text.textContent = `#${row.rank}  ${row.label}  riv ${row.riv.toFixed(1)}`;
    const badge = document.createElement("span");
    badge.className = `badge ${row.badge.toLowerCase()}`;
    badge.textContent = row.badge;
    card.append(swatch, text, badge);
    if (!model.mustRequery) {
      card.classList.add("clickable");
      card.addEventListener("click", () => onClickResult(row.object));
    }
    resultsDiv.appendChild(card);
  }
}

function renderReward(): void {
  rewardDiv.textContent =
    model.lastReward === null ? "" : `reward +${model.lastReward.toFixed(1)}`;
}

function renderCharts(): void {
  const gen = model.series.map((s) => s.generator);
  const pool = model.series.map((s) => s.pool);
  const bounds = seriesBounds([gen, pool]);
  sizesSvg.innerHTML =
    `<path d="${linePath(gen, CHART_W, CHART_H, bounds)}" class="line generator"/>` +
    `<path d="${linePath(pool, CHART_W, CHART_H, bounds)}" class="line pool"/>`;

  const p = model.series.map((s) => s.p ?? 0);
  pSvg.innerHTML = `<path d="${linePath(p, CHART_W, CHART_H, { min: 0, max: 1 })}" class="line p"/>`;

  if (model.series.length > 0) {
    const first = model.series[0];
    const last = model.series[model.series.length - 1];
    axisCaption.textContent =
      `events ${first.event} to ${last.event}, ` +
      `wall ${(first.wallMs / 1000).toFixed(0)}s to ${(last.wallMs / 1000).toFixed(0)}s, ` +
      `generator ${last.generator} / pool ${last.pool}` +
      (last.p === null ? "" : ` / p ${last.p.toFixed(3)}`);
  }
}

function renderLog(): void {
  logList.innerHTML = "";
  for (const event of model.log.slice(-40).reverse()) {
    const item = document.createElement("li");
    item.className = event.kind;
    item.textContent = `[${(event.wallMs / 1000).toFixed(1)}s] ${event.text}`;
    logList.appendChild(item);
  }
}

function renderAll(): void {
  renderBanner();
  renderResults();
  renderReward();
  renderCharts();
  renderLog();
}

// --------------------------------------------------------------- actions

async function onSubmit(): Promise<void> {
  const text = queryInput.value;
  if (!model.canSubmit(text) || !model.beginMutation()) return;
  const terms = model.parseTerms(text);
  try {
    const resp = await client.query(session, terms);
    model.showQuery(terms, resp, now());
  } catch (err) {
    model.showError(err instanceof Error ? err.message : String(err), now());
  } finally {
    model.endMutation();
  }
  renderAll();
}

async function onClickResult(object: number): Promise<void> {
  if (model.token === null || model.mustRequery || !model.beginMutation()) return;
  try {
    const resp = await client.click(session, model.token, object);
    model.showClick(object, resp, now());
  } catch (err) {
    if (err instanceof GatewayError && err.status === 409) {
      model.showConflict(err.message, now());
    } else {
      model.showError(err instanceof Error ? err.message : String(err), now());
    }
  } finally {
    model.endMutation();
  }
  renderAll();
}

async function onDeconstruct(): Promise<void> {
  const object = Number(deconstructInput.value);
  if (!Number.isInteger(object) || !model.beginMutation()) return;
  try {
    const resp = await client.deconstruct(object);
    model.showDeconstruct(object, resp.removed, now());
  } catch (err) {
    model.showError(err instanceof Error ? err.message : String(err), now());
  } finally {
    model.endMutation();
  }
  renderAll();
}

async function poll(): Promise<void> {
  try {
    const m = await client.metrics();
    model.showMetrics(m, now());
    renderCharts();
  } catch {
    // missed poll: skip it, never fabricate a point
  }
}

// ----------------------------------------------------------------- wire

queryInput.addEventListener("input", () => {
  submitBtn.disabled = !model.canSubmit(queryInput.value);
});
el<HTMLFormElement>("query-form").addEventListener("submit", (ev) => {
  ev.preventDefault();
  void onSubmit();
});
deconstructBtn.addEventListener("click", () => void onDeconstruct());

submitBtn.disabled = true;
void poll();
setInterval(() => void poll(), POLL_MS);
