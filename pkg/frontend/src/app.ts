// Single-page learner session client. Every number on screen is copied from a
// server response; the client never recomputes engine math. Numeric elements
// carry the raw response value in data-value, with the visible text merely a
// formatted rendering, so the screen can be checked against the API exactly.

import {
  ApiClient,
  ApiError,
  ItemCard,
  NextView,
  SessionView,
  Signals,
  SubmitView,
} from "./api.js";

// Gauge state, verbatim from whichever response carried these fields last
// (session view on create/resync, assessment response on submit).
interface GaugeNumbers {
  mastery: Record<string, number>;
  engagement: number;
  performance: number;
  signals: Signals;
}

const SIGNAL_LABELS: [keyof Signals, string][] = [
  ["rolling_accuracy", "accuracy"],
  ["accuracy_trend", "trend"],
  ["mean_engagement", "engagement"],
  ["pace", "pace"],
  ["streak", "streak"],
];

function fmt(value: number): string {
  return value.toFixed(3);
}

function difficultyBand(difficulty: number): string {
  if (difficulty < 0.3) return "light";
  if (difficulty < 0.6) return "moderate";
  return "demanding";
}

export function splitObjectives(text: string): string[] {
  return text
    .split(",")
    .map((part) => part.trim())
    .filter((part) => part.length > 0);
}

export class App {
  private view: SessionView | null = null;
  private serving: NextView | null = null;
  private preview: NextView | null = null;
  private previewWeights: { beta: number; gamma: number } | null = null;
  private gauges: GaugeNumbers | null = null;
  private busy = false;
  private bannerText: string | null = null;
  private retryAction: (() => Promise<void>) | null = null;
  private current: Promise<void> = Promise.resolve();

  constructor(
    private readonly root: HTMLElement,
    private readonly client: ApiClient,
  ) {
    this.buildChrome();
    window.addEventListener("focus", () => {
      void this.resync();
    });
  }

  /** Resolves when the action in flight (if any) has settled. */
  idle(): Promise<void> {
    return this.current;
  }

  sessionId(): string | null {
    return this.view ? this.view.session_id : null;
  }

  private element<T extends HTMLElement>(id: string): T {
    const found = this.root.querySelector<T>(`#${id}`);
    if (!found) throw new Error(`missing element #${id}`);
    return found;
  }

  private buildChrome(): void {
    this.root.innerHTML = `
      <div id="banner" hidden>
        <span id="banner-message"></span>
        <button id="banner-retry" type="button" hidden>retry</button>
      </div>
      <section id="start-pane">
        <h1>Learning session</h1>
        <label>learner <input id="learner-input" value="learner" /></label>
        <label>objectives (comma separated skill ids)
          <input id="objectives-input" placeholder="data-cleaning, formulas" />
        </label>
        <button id="start-button" type="button">start session</button>
      </section>
      <section id="session-pane" hidden>
        <p id="status-line">
          <span id="learner-value"></span>
          <span id="status-value"></span>
          tick <span id="tick-value"></span>,
          <span id="assessments-value"></span> assessments
        </p>
        <p id="completed-note" hidden>All selected objectives are mastered. Session complete.</p>
        <div id="gauges"></div>
        <div id="performance-block">
          <div class="gauge" id="performance-gauge"></div>
          <svg id="sparkline" width="160" height="36" viewBox="0 0 160 36"></svg>
        </div>
        <div id="signals"></div>
        <section id="item-pane" hidden>
          <h2>Current item</h2>
          <div id="item-card"></div>
          <label>your score <input id="score-input" type="range" min="0" max="1" step="0.05" value="0.8" />
            <span id="score-value">0.80</span>
          </label>
          <button id="submit-button" type="button">submit answer</button>
        </section>
        <section id="pathway-pane" hidden>
          <h2>Recommended pathway</h2>
          <ol id="pathway-list"></ol>
          <p class="scores">
            E <span id="pathway-engagement" class="num"></span>
            Q <span id="pathway-quality" class="num"></span>
            R <span id="pathway-reward" class="num"></span>
            (beta <span id="beta-current" class="num"></span>,
            gamma <span id="gamma-current" class="num"></span>)
          </p>
          <div id="explanation"></div>
        </section>
        <section id="whatif-pane" hidden>
          <h2>What-if weights</h2>
          <label>beta <input id="beta-input" type="range" min="0" max="2" step="0.01" />
            <span id="beta-value"></span>
          </label>
          <label>gamma <input id="gamma-input" type="range" min="0" max="2" step="0.01" />
            <span id="gamma-value"></span>
          </label>
          <p id="whatif-hint" hidden>weights must not both be zero</p>
          <button id="preview-button" type="button">preview</button>
          <div id="preview-pane" hidden>
            <h3>Previewed pathway</h3>
            <ol id="preview-list"></ol>
            <p class="scores">
              E <span id="preview-engagement" class="num"></span>
              Q <span id="preview-quality" class="num"></span>
              R <span id="preview-reward" class="num"></span>
            </p>
            <button id="adopt-button" type="button">adopt these weights</button>
          </div>
        </section>
        <section id="events-pane" hidden>
          <h2>Events</h2>
          <ul id="events-list"></ul>
        </section>
      </section>
    `;
    this.element<HTMLButtonElement>("start-button").addEventListener("click", () => {
      void this.start();
    });
    this.element<HTMLButtonElement>("submit-button").addEventListener("click", () => {
      void this.submit();
    });
    this.element<HTMLButtonElement>("preview-button").addEventListener("click", () => {
      void this.previewWhatIf();
    });
    this.element<HTMLButtonElement>("adopt-button").addEventListener("click", () => {
      void this.adopt();
    });
    this.element<HTMLButtonElement>("banner-retry").addEventListener("click", () => {
      const action = this.retryAction;
      if (action) void action();
    });
    const score = this.element<HTMLInputElement>("score-input");
    score.addEventListener("input", () => {
      this.element("score-value").textContent = Number(score.value).toFixed(2);
    });
    for (const id of ["beta-input", "gamma-input"]) {
      const slider = this.element<HTMLInputElement>(id);
      slider.addEventListener("input", () => this.renderWhatIfControls());
    }
  }

  // --- actions -------------------------------------------------------------

  start(): Promise<void> {
    if (this.busy) return Promise.resolve();
    this.current = this.doStart();
    return this.current;
  }

  private async doStart(): Promise<void> {
    this.busy = true;
    this.renderControls();
    try {
      const learner = this.element<HTMLInputElement>("learner-input").value.trim() || "learner";
      const objectives = splitObjectives(this.element<HTMLInputElement>("objectives-input").value);
      const view = await this.client.createSession({ learner_id: learner, objectives });
      this.view = view;
      this.gauges = {
        mastery: view.mastery,
        engagement: view.engagement,
        performance: view.performance,
        signals: view.signals,
      };
      this.serving = view.status === "active" ? await this.client.nextItem(view.session_id) : null;
      this.preview = null;
      this.previewWeights = null;
      this.setSliders(view.reward_weights.beta, view.reward_weights.gamma);
      this.clearBanner();
    } catch (error) {
      this.showError(error, () => this.start());
    } finally {
      this.busy = false;
      this.render();
    }
  }

  submit(): Promise<void> {
    if (this.busy) return Promise.resolve();
    this.current = this.doSubmit();
    return this.current;
  }

  private async doSubmit(): Promise<void> {
    this.busy = true;
    this.renderControls();
    const view = this.view;
    const serving = this.serving;
    if (!view || !serving || !serving.next_item) {
      this.busy = false;
      this.renderControls();
      return;
    }
    try {
      const submitted: SubmitView = await this.client.submitAssessment(view.session_id, {
        sequence: serving.next_sequence,
        item_id: serving.next_item.item_id,
        score: Number(this.element<HTMLInputElement>("score-input").value),
      });
      // Gauges move on server confirmation only, straight from this response.
      this.gauges = {
        mastery: submitted.mastery,
        engagement: submitted.engagement,
        performance: submitted.performance,
        signals: submitted.signals,
      };
      this.preview = null;
      this.previewWeights = null;
      this.view = await this.client.getSession(view.session_id);
      this.serving =
        submitted.status === "active" ? await this.client.nextItem(view.session_id) : null;
      this.clearBanner();
    } catch (error) {
      if (error instanceof ApiError && (error.status === 409 || error.status === 410)) {
        await this.resyncAfter(error);
      } else {
        this.showError(error, () => this.submit());
      }
    } finally {
      this.busy = false;
      this.render();
    }
  }

  previewWhatIf(): Promise<void> {
    this.current = this.doPreview();
    return this.current;
  }

  private async doPreview(): Promise<void> {
    const view = this.view;
    if (!view || view.status !== "active") return;
    const weights = this.sliderWeights();
    if (!weights) return;
    try {
      // Read-only: no adopt flag, nothing is written server-side.
      this.preview = await this.client.nextItem(view.session_id, weights);
      this.previewWeights = weights;
      this.clearBanner();
    } catch (error) {
      this.showError(error, () => this.previewWhatIf());
    }
    this.render();
  }

  adopt(): Promise<void> {
    if (this.busy) return Promise.resolve();
    this.current = this.doAdopt();
    return this.current;
  }

  private async doAdopt(): Promise<void> {
    this.busy = true;
    this.renderControls();
    const view = this.view;
    const weights = this.previewWeights;
    if (!view || !weights) {
      this.busy = false;
      this.renderControls();
      return;
    }
    try {
      this.serving = await this.client.nextItem(view.session_id, { ...weights, adopt: true });
      this.view = await this.client.getSession(view.session_id);
      this.preview = null;
      this.previewWeights = null;
      this.setSliders(this.view.reward_weights.beta, this.view.reward_weights.gamma);
      this.clearBanner();
    } catch (error) {
      this.showError(error, () => this.adopt());
    } finally {
      this.busy = false;
      this.render();
    }
  }

  resync(): Promise<void> {
    if (!this.view || this.busy) return Promise.resolve();
    this.current = this.doResync();
    return this.current;
  }

  private async doResync(): Promise<void> {
    const view = this.view;
    if (!view) return;
    try {
      const fresh = await this.client.getSession(view.session_id);
      this.view = fresh;
      this.gauges = {
        mastery: fresh.mastery,
        engagement: fresh.engagement,
        performance: fresh.performance,
        signals: fresh.signals,
      };
      this.serving =
        fresh.status === "active" ? await this.client.nextItem(fresh.session_id) : null;
      this.clearBanner();
    } catch (error) {
      this.showError(error, () => this.resync());
    }
    this.render();
  }

  /** Conflict or completion: the server is ahead of us, refetch and say so. */
  private async resyncAfter(error: ApiError): Promise<void> {
    const view = this.view;
    if (!view) return;
    this.view = await this.client.getSession(view.session_id);
    this.gauges = {
      mastery: this.view.mastery,
      engagement: this.view.engagement,
      performance: this.view.performance,
      signals: this.view.signals,
    };
    this.serving =
      this.view.status === "active" ? await this.client.nextItem(view.session_id) : null;
    this.preview = null;
    this.previewWeights = null;
    if (error.status === 409) {
      this.bannerText = `submission was out of date (${error.message}); session refreshed`;
      this.retryAction = null;
    } else {
      this.clearBanner();
    }
  }

  // --- state helpers -------------------------------------------------------

  private sliderWeights(): { beta: number; gamma: number } | null {
    const beta = Number(this.element<HTMLInputElement>("beta-input").value);
    const gamma = Number(this.element<HTMLInputElement>("gamma-input").value);
    if (beta < 0 || gamma < 0 || beta + gamma <= 0) return null;
    return { beta, gamma };
  }

  private setSliders(beta: number, gamma: number): void {
    const betaInput = this.element<HTMLInputElement>("beta-input");
    const gammaInput = this.element<HTMLInputElement>("gamma-input");
    betaInput.value = String(beta);
    gammaInput.value = String(gamma);
  }

  private showError(error: unknown, retry: (() => Promise<void>) | null): void {
    const message =
      error instanceof ApiError
        ? `${error.code}: ${error.message}`
        : "service unreachable; check that the session API is running";
    this.bannerText = message;
    this.retryAction = retry;
  }

  private clearBanner(): void {
    this.bannerText = null;
    this.retryAction = null;
  }

  // --- rendering -----------------------------------------------------------

  private render(): void {
    this.renderBanner();
    const view = this.view;
    this.element("start-pane").hidden = view !== null;
    this.element("session-pane").hidden = view === null;
    if (!view) {
      this.renderControls();
      return;
    }

    this.element("learner-value").textContent = view.learner_id;
    this.element("status-value").textContent = view.status;
    this.element("tick-value").textContent = String(view.tick);
    this.element("assessments-value").textContent = String(view.assessments);
    this.element("completed-note").hidden = view.status !== "completed";

    this.renderGauges();
    this.renderSparkline(view.performance_history);
    this.renderServing();
    this.renderPreviewPane();
    this.renderEvents();
    this.renderWhatIfControls();
    this.renderControls();
  }

  private numberCell(target: HTMLElement, value: number): void {
    target.textContent = fmt(value);
    target.dataset.value = String(value);
  }

  private gaugeRow(label: string, value: number, skill?: string): HTMLDivElement {
    const row = document.createElement("div");
    row.className = "gauge";
    if (skill !== undefined) row.dataset.skill = skill;
    const name = document.createElement("span");
    name.className = "gauge-label";
    name.textContent = label;
    const track = document.createElement("div");
    track.className = "gauge-track";
    const fill = document.createElement("div");
    fill.className = "gauge-fill";
    fill.style.width = `${Math.max(0, Math.min(1, value)) * 100}%`;
    track.appendChild(fill);
    const num = document.createElement("span");
    num.className = "gauge-value";
    this.numberCell(num, value);
    row.append(name, track, num);
    return row;
  }

  private renderGauges(): void {
    const gauges = this.gauges;
    const container = this.element("gauges");
    container.replaceChildren();
    if (!gauges) return;
    for (const skill of Object.keys(gauges.mastery).sort()) {
      container.appendChild(this.gaugeRow(skill, gauges.mastery[skill], skill));
    }
    container.appendChild(this.gaugeRow("engagement", gauges.engagement, "__engagement__"));
    const performance = this.element("performance-gauge");
    performance.replaceChildren(this.gaugeRow("performance P(t)", gauges.performance, "__performance__"));
    const signals = this.element("signals");
    signals.replaceChildren();
    for (const [key, label] of SIGNAL_LABELS) {
      const cell = document.createElement("span");
      cell.className = "signal";
      cell.dataset.signal = key;
      const num = document.createElement("span");
      this.numberCell(num, gauges.signals[key]);
      cell.append(`${label} `, num);
      signals.appendChild(cell);
    }
  }

  private renderSparkline(history: [number, number][]): void {
    const svg = this.element<HTMLElement>("sparkline");
    svg.replaceChildren();
    if (history.length === 0) return;
    const step = history.length > 1 ? 156 / (history.length - 1) : 0;
    const points = history
      .map(([, value], index) => `${(2 + index * step).toFixed(1)},${(34 - value * 32).toFixed(1)}`)
      .join(" ");
    const line = document.createElementNS("http://www.w3.org/2000/svg", "polyline");
    line.setAttribute("points", points);
    line.setAttribute("fill", "none");
    line.setAttribute("stroke", "currentColor");
    svg.appendChild(line);
  }

  private itemCard(item: ItemCard): HTMLDivElement {
    const card = document.createElement("div");
    card.className = "item-card";
    card.dataset.itemId = item.item_id;
    const title = document.createElement("strong");
    title.className = "item-title";
    title.textContent = item.item_id;
    const meta = document.createElement("p");
    meta.className = "item-meta";
    meta.textContent =
      `${item.modality}, ${difficultyBand(item.difficulty)} (difficulty ${fmt(item.difficulty)}), ` +
      `${item.duration_minutes} min, teaches ${Object.keys(item.skills).sort().join(", ")}`;
    card.append(title, meta);
    return card;
  }

  private pathwayRows(list: HTMLElement, serving: NextView): void {
    list.replaceChildren();
    for (const item of serving.pathway.items) {
      const row = document.createElement("li");
      row.dataset.itemId = item.item_id;
      row.textContent = `${item.item_id} (${item.modality}, difficulty ${fmt(item.difficulty)})`;
      list.appendChild(row);
    }
  }

  private renderServing(): void {
    const serving = this.serving;
    const itemPane = this.element("item-pane");
    const pathwayPane = this.element("pathway-pane");
    if (!serving) {
      itemPane.hidden = true;
      pathwayPane.hidden = true;
      return;
    }
    pathwayPane.hidden = false;
    this.pathwayRows(this.element("pathway-list"), serving);
    this.numberCell(this.element("pathway-engagement"), serving.pathway.engagement);
    this.numberCell(this.element("pathway-quality"), serving.pathway.quality);
    this.numberCell(this.element("pathway-reward"), serving.pathway.reward);
    this.numberCell(this.element("beta-current"), serving.beta);
    this.numberCell(this.element("gamma-current"), serving.gamma);

    const explanation = this.element("explanation");
    explanation.replaceChildren();
    if (serving.explanation) {
      const summary = document.createElement("p");
      summary.textContent = serving.explanation.summary;
      explanation.appendChild(summary);
      const lines = document.createElement("ul");
      for (const entry of serving.explanation.rationale) {
        const line = document.createElement("li");
        line.dataset.itemId = entry.item_id;
        line.textContent = entry.text;
        lines.appendChild(line);
      }
      explanation.appendChild(lines);
    }

    const card = this.element("item-card");
    card.replaceChildren();
    if (serving.next_item) {
      itemPane.hidden = false;
      if (serving.study_items.length > 0) {
        const note = document.createElement("p");
        note.className = "study-note";
        note.textContent =
          "review first: " + serving.study_items.map((item) => item.item_id).join(", ");
        card.appendChild(note);
      }
      card.appendChild(this.itemCard(serving.next_item));
    } else {
      itemPane.hidden = true;
    }
  }

  private renderPreviewPane(): void {
    const pane = this.element("preview-pane");
    const preview = this.preview;
    if (!preview) {
      pane.hidden = true;
      return;
    }
    pane.hidden = false;
    this.pathwayRows(this.element("preview-list"), preview);
    this.numberCell(this.element("preview-engagement"), preview.pathway.engagement);
    this.numberCell(this.element("preview-quality"), preview.pathway.quality);
    this.numberCell(this.element("preview-reward"), preview.pathway.reward);
  }

  private renderEvents(): void {
    const view = this.view;
    const pane = this.element("events-pane");
    if (!view) {
      pane.hidden = true;
      return;
    }
    pane.hidden = false;
    const list = this.element("events-list");
    list.replaceChildren();
    for (const event of view.events) {
      const row = document.createElement("li");
      row.dataset.kind = event.kind;
      row.dataset.seq = String(event.seq);
      row.textContent = `${event.seq} ${event.kind} @${event.tick}`;
      list.appendChild(row);
    }
  }

  private renderWhatIfControls(): void {
    const view = this.view;
    const pane = this.element("whatif-pane");
    pane.hidden = !view || view.status !== "active";
    if (pane.hidden) return;
    const beta = this.element<HTMLInputElement>("beta-input");
    const gamma = this.element<HTMLInputElement>("gamma-input");
    this.element("beta-value").textContent = Number(beta.value).toFixed(2);
    this.element("gamma-value").textContent = Number(gamma.value).toFixed(2);
    const invalid = this.sliderWeights() === null;
    this.element("whatif-hint").hidden = !invalid;
    this.element<HTMLButtonElement>("preview-button").disabled = invalid;
    this.element<HTMLButtonElement>("adopt-button").disabled =
      this.busy || this.previewWeights === null;
  }

  private renderControls(): void {
    this.element<HTMLButtonElement>("start-button").disabled = this.busy;
    this.element<HTMLButtonElement>("submit-button").disabled =
      this.busy || !this.serving || !this.serving.next_item;
    this.element<HTMLButtonElement>("adopt-button").disabled =
      this.busy || this.previewWeights === null;
  }

  private renderBanner(): void {
    const banner = this.element("banner");
    const hasMessage = this.bannerText !== null;
    banner.hidden = !hasMessage;
    this.element("banner-message").textContent = this.bannerText ?? "";
    this.element<HTMLButtonElement>("banner-retry").hidden = this.retryAction === null;
  }
}
