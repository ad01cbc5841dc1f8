import { ApiError, NextPair, RankingRow, SessionApi, Winner } from "./api.js";

// One comparison session, three screens: create -> compare -> finished.
// All state transitions round-trip through the server; the UI never
// invents a ranking and never has more than one request in flight.

type Screen = "create" | "compare" | "finished";

export class App {
  private screen: Screen = "create";
  private sessionId = "";
  private budget = 0;
  private pair: NextPair | null = null;
  private rankingRows: RankingRow[] = [];
  private rankingStale = false;
  private busy = false;
  private error = "";

  constructor(
    private root: HTMLElement,
    private api: SessionApi,
  ) {
    this.root.addEventListener("click", (ev) => this.onClick(ev));
    this.root.ownerDocument.addEventListener("keydown", (ev) => this.onKey(ev));
    this.render();
  }

  // --- event wiring -------------------------------------------------------

  private onClick(ev: Event): void {
    const target = ev.target as HTMLElement;
    const action = target.closest("[data-action]")?.getAttribute("data-action");
    if (!action) return;
    if (action === "create") void this.createSession();
    if (action === "first" || action === "second" || action === "draw") {
      void this.answer(action as Winner);
    }
    if (action === "restart") {
      this.screen = "create";
      this.error = "";
      this.render();
    }
  }

  private onKey(ev: KeyboardEvent): void {
    if (this.screen !== "compare") return;
    if (ev.key === "ArrowLeft") void this.answer("first");
    else if (ev.key === "ArrowRight") void this.answer("second");
    else if (ev.key === " ") {
      ev.preventDefault();
      void this.answer("draw");
    }
  }

  // --- actions ------------------------------------------------------------

  async createSession(): Promise<void> {
    if (this.busy) return;
    const box = this.root.querySelector<HTMLTextAreaElement>("#items")!;
    const labels = box.value
      .split("\n")
      .map((s) => s.trim())
      .filter((s) => s.length > 0);
    if (labels.length < 2) {
      this.error = "enter at least 2 items, one per line";
      this.render();
      return;
    }
    if (new Set(labels).size !== labels.length) {
      this.error = "items must be distinct";
      this.render();
      return;
    }
    this.busy = true;
    try {
      const created = await this.api.createSession(labels);
      this.sessionId = created.session_id;
      this.budget = created.budget;
      this.error = "";
      this.screen = "compare";
      await this.refreshPair();
      await this.refreshRanking();
    } catch (err) {
      this.error = err instanceof ApiError ? String(err.body["detail"]) : "network error, try again";
    } finally {
      this.busy = false;
      this.render();
    }
  }

  async answer(winner: Winner): Promise<void> {
    // single in-flight request: rapid double clicks submit exactly once
    if (this.busy || this.screen !== "compare" || this.pair === null) return;
    this.busy = true;
    const token = this.pair.pair_token;
    try {
      const progress = await this.api.postOutcome(this.sessionId, token, winner);
      if (progress.done) {
        await this.finish();
      } else {
        await this.refreshPair();
        await this.refreshRanking();
      }
      this.error = "";
    } catch (err) {
      if (err instanceof ApiError && err.staleToken) {
        await this.refreshPair(); // someone else answered; just move on
      } else if (err instanceof ApiError && err.sessionDone) {
        await this.finish();
      } else {
        this.error = "could not submit, try again";
      }
    } finally {
      this.busy = false;
      this.render();
    }
  }

  private async finish(): Promise<void> {
    this.screen = "finished";
    this.pair = null;
    await this.refreshRanking();
  }

  private async refreshPair(): Promise<void> {
    try {
      this.pair = await this.api.nextPair(this.sessionId);
    } catch (err) {
      if (err instanceof ApiError && err.sessionDone) {
        await this.finish();
        return;
      }
      throw err;
    }
  }

  private async refreshRanking(): Promise<void> {
    try {
      const r = await this.api.ranking(this.sessionId);
      this.rankingRows = r.ranking;
      this.rankingStale = false;
    } catch {
      this.rankingStale = true; // keep last known rows, flag them
    }
  }

  // --- rendering ----------------------------------------------------------

  private render(): void {
    if (this.screen === "create") this.root.innerHTML = this.createScreen();
    else if (this.screen === "compare") this.root.innerHTML = this.compareScreen();
    else this.root.innerHTML = this.finishedScreen();
  }

  private createScreen(): string {
    return `
      <h1>Sort a list by comparing pairs</h1>
      <p>Paste or type your items, one per line.</p>
      <textarea id="items" rows="10" cols="40" placeholder="one item per line"></textarea>
      <div>
        <button data-action="create">Start sorting</button>
      </div>
      ${this.error ? `<p class="error" data-role="error">${escapeHtml(this.error)}</p>` : ""}
    `;
  }

  private compareScreen(): string {
    const pair = this.pair;
    const done = pair ? pair.comparisons_done : 0;
    const pct = this.budget > 0 ? Math.round((100 * done) / this.budget) : 0;
    return `
      <h1>Which is better?</h1>
      <p data-role="progress">${done} / ${this.budget} answered</p>
      <div class="bar"><div class="fill" style="width:${pct}%"></div></div>
      <div class="pair">
        <button class="choice" data-action="first" ${this.busy ? "disabled" : ""}
          data-role="first">${pair ? escapeHtml(pair.first_label) : "…"}</button>
        <button class="choice" data-action="second" ${this.busy ? "disabled" : ""}
          data-role="second">${pair ? escapeHtml(pair.second_label) : "…"}</button>
      </div>
      <button data-action="draw" ${this.busy ? "disabled" : ""}>It's a draw</button>
      <p class="hint">shortcuts: &larr; left wins, &rarr; right wins, space = draw</p>
      ${this.error ? `<p class="error" data-role="error">${escapeHtml(this.error)}</p>` : ""}
      ${this.rankingPanel("Live ranking")}
    `;
  }

  private finishedScreen(): string {
    return `
      <h1>Done!</h1>
      <p data-role="progress">All ${this.budget} comparisons answered.</p>
      ${this.rankingPanel("Final ranking")}
      <button data-action="restart">Sort another list</button>
    `;
  }

  private rankingPanel(title: string): string {
    const rows = this.rankingRows
      .map(
        (r) => `
        <tr data-role="ranking-row">
          <td>${r.rank}</td>
          <td data-role="ranked-label">${escapeHtml(r.label)}</td>
          <td>${r.conservative_score.toFixed(2)}</td>
          <td>&plusmn;${r.sigma.toFixed(2)}</td>
        </tr>`,
      )
      .join("");
    return `
      <h2>${title}${this.rankingStale ? ' <span class="stale" data-role="stale">stale</span>' : ""}</h2>
      <table class="ranking">
        <thead><tr><th>#</th><th>item</th><th>score</th><th>uncertainty</th></tr></thead>
        <tbody>${rows}</tbody>
      </table>
    `;
  }
}

function escapeHtml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
