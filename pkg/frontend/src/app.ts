/** Four-screen session controller: goal entry → requirements review →
 * question loop with live graph → assessment and export. The rendered graph
 * is always the server's latest snapshot; the client never mutates it
 * speculatively. */

import { ApiClient, ApiError } from "./api.js";
import { layoutGraph } from "./layout.js";
import type {
  Answer,
  AssessmentEdit,
  AssessmentRow,
  GraphOverview,
  NodeDetail,
  Progress,
  Question,
} from "./types.js";

export type Screen = "goal" | "requirements" | "question" | "assessment";

export interface AnsweredEntry {
  question: Question;
  answer: Answer;
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export class App {
  screen: Screen = "goal";
  sessionId: string | null = null;
  requirements: string[] = [];
  graph: GraphOverview = { data_flow: [], interactions: [] };
  question: Question | null = null;
  progress: Progress | null = null;
  terminatedReason: string | null = null;
  answered: AnsweredEntry[] = [];
  rows: AssessmentRow[] = [];
  detailNodeId: string | null = null;
  detail: Record<string, NodeDetail> = {};
  graphHidden = false;
  mode = "auto";
  notice: string | null = null;
  /** single active request per session: submit controls disable in flight */
  busy = false;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
  ) {
    this.render();
  }

  // ----------------------------------------------------------------- actions

  async submitGoal(goal: string, seed?: number): Promise<void> {
    await this.guarded(async () => {
      const created = await this.api.createSession(goal, seed);
      this.sessionId = created.session_id;
      this.requirements = [...created.requirements];
      this.graph = created.initial_graph;
      this.screen = "requirements";
    });
  }

  editRequirement(index: number, text: string): void {
    this.requirements[index] = text;
    this.render();
  }

  async confirmRequirements(): Promise<void> {
    await this.guarded(async () => {
      await this.api.putRequirements(this.session(), this.requirements);
      this.screen = "question";
      await this.refreshQuestion();
    });
  }

  async refreshQuestion(): Promise<void> {
    const result = await this.api.getQuestion(this.session());
    if (result.terminated) {
      this.question = null;
      this.terminatedReason = result.reason;
    } else {
      this.question = result.question;
      this.progress = result.progress;
      this.terminatedReason = null;
    }
  }

  async submitSelected(indices: number[]): Promise<void> {
    await this.sendAnswer({
      question_id: this.currentQuestion().id,
      variant: "selected",
      selected: indices,
    });
  }

  async submitCustom(text: string): Promise<void> {
    await this.sendAnswer({
      question_id: this.currentQuestion().id,
      variant: "custom",
      custom: text,
    });
  }

  async skip(): Promise<void> {
    await this.sendAnswer({ question_id: this.currentQuestion().id, variant: "skip" });
  }

  async revise(questionId: string, replacement: Answer): Promise<void> {
    await this.guarded(async () => {
      const response = await this.api.postAnswer(this.session(), {
        question_id: questionId,
        variant: "revise",
        revised: replacement,
      });
      this.graph = response.graph;
      const entry = this.answered.find((e) => e.question.id === questionId);
      if (entry) {
        entry.answer = replacement;
      }
    });
  }

  private async sendAnswer(answer: Answer): Promise<void> {
    const question = this.currentQuestion();
    try {
      this.busy = true;
      this.render();
      const response = await this.api.postAnswer(this.session(), answer);
      this.graph = response.graph;
      this.progress = response.progress;
      this.answered.push({ question, answer });
      this.question = null;
      await this.refreshQuestion();
      this.notice = null;
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        // stale answer: re-fetch the server's current question
        this.notice = error.detail;
        await this.refreshQuestion();
      } else if (error instanceof ApiError) {
        this.notice = error.detail;
      } else {
        throw error;
      }
    } finally {
      this.busy = false;
      this.render();
    }
  }

  async setMode(mode: string): Promise<void> {
    await this.guarded(async () => {
      const response = await this.api.postMode(this.session(), mode);
      this.mode = response.mode;
    });
  }

  async stopSession(): Promise<void> {
    await this.guarded(async () => {
      const response = await this.api.postStop(this.session());
      this.terminatedReason = response.terminated;
      this.question = null;
    });
  }

  async resume(): Promise<void> {
    await this.guarded(async () => {
      await this.api.postResume(this.session());
      this.terminatedReason = null;
      this.screen = "question";
      await this.refreshQuestion();
    });
  }

  async beginAssessment(): Promise<void> {
    await this.guarded(async () => {
      const response = await this.api.buildAssessment(this.session());
      this.rows = response.rows;
      this.screen = "assessment";
    });
  }

  async applyEdit(edit: AssessmentEdit): Promise<void> {
    await this.guarded(async () => {
      const response = await this.api.patchAssessment(this.session(), edit);
      this.rows = response.rows;
    });
  }

  async exportWorksheet(format: "csv" | "xlsx"): Promise<Uint8Array> {
    const data = await this.api.exportWorksheet(this.session(), format);
    this.triggerDownload(data, `assessment.${format}`);
    return data;
  }

  async showDetail(nodeId: string): Promise<void> {
    await this.guarded(async () => {
      const representation = await this.api.getRepresentation(this.session());
      this.detail = representation.detail;
      this.detailNodeId = nodeId;
    });
  }

  toggleGraph(): void {
    this.graphHidden = !this.graphHidden;
    this.render();
  }

  // ----------------------------------------------------------------- helpers

  private session(): string {
    if (!this.sessionId) {
      throw new Error("no active session");
    }
    return this.sessionId;
  }

  private currentQuestion(): Question {
    if (!this.question) {
      throw new Error("no question on screen");
    }
    return this.question;
  }

  private async guarded(action: () => Promise<void>): Promise<void> {
    try {
      this.busy = true;
      this.render();
      await action();
      this.notice = null;
    } catch (error) {
      if (error instanceof ApiError) {
        this.notice = error.detail;
      } else {
        throw error;
      }
    } finally {
      this.busy = false;
      this.render();
    }
  }

  private triggerDownload(data: Uint8Array, filename: string): void {
    if (typeof URL.createObjectURL !== "function") {
      return; // non-browser runtime (tests); the caller still gets the bytes
    }
    const url = URL.createObjectURL(new Blob([data as BlobPart]));
    const anchor = document.createElement("a");
    anchor.href = url;
    anchor.download = filename;
    anchor.click();
    URL.revokeObjectURL(url);
  }

  // ---------------------------------------------------------------- rendering

  render(): void {
    const notice = this.notice
      ? `<div id="notice" class="notice">${escapeHtml(this.notice)}</div>`
      : "";
    let body: string;
    switch (this.screen) {
      case "goal":
        body = this.renderGoal();
        break;
      case "requirements":
        body = this.renderRequirements();
        break;
      case "question":
        body = this.renderQuestion();
        break;
      case "assessment":
        body = this.renderAssessment();
        break;
    }
    this.root.innerHTML = `<main data-screen="${this.screen}">${notice}${body}</main>`;
    this.wire();
  }

  private renderGoal(): string {
    return `
      <section id="goal-screen">
        <h1>Privacy design elicitation</h1>
        <label>Design goal
          <input id="goal-input" type="text" placeholder="Describe the feature in one sentence" />
        </label>
        <label>Seed (optional)
          <input id="seed-input" type="number" />
        </label>
        <button id="start-btn" ${this.busy ? "disabled" : ""}>Start session</button>
      </section>`;
  }

  private renderRequirements(): string {
    const items = this.requirements
      .map(
        (req, i) => `
        <li class="requirement">
          <input class="req-input" data-index="${i}" value="${escapeHtml(req)}" />
        </li>`,
      )
      .join("");
    return `
      <section id="requirements-screen">
        <h1>Review the expanded requirements</h1>
        <p>Adjust any line to match your intent, then confirm.</p>
        <ul id="requirements-list">${items}</ul>
        <button id="confirm-reqs" ${this.busy ? "disabled" : ""}>Confirm requirements</button>
      </section>`;
  }

  private renderGraphPane(): string {
    if (this.graphHidden) {
      return `<div id="graph-pane" class="hidden"></div>`;
    }
    const highlightId = this.question?.target_node ?? null;
    const nodes = layoutGraph(this.graph)
      .map((node) => {
        const classes = ["graph-node", `kind-${node.kind}`];
        if (node.id === highlightId) {
          classes.push("highlighted");
        }
        return `
        <div class="${classes.join(" ")}" data-node-id="${node.id}"
             style="grid-column:${node.column + 1};grid-row:${node.row + 1}">
          <span class="node-kind">${escapeHtml(node.kind)}</span>
          <span class="node-label">${escapeHtml(node.label)}</span>
        </div>`;
      })
      .join("");
    return `<div id="graph-pane">${nodes}</div>${this.renderDetailPanel()}`;
  }

  private renderDetailPanel(): string {
    if (!this.detailNodeId || !(this.detailNodeId in this.detail)) {
      return `<div id="detail-panel" class="empty"></div>`;
    }
    const node = this.detail[this.detailNodeId];
    const decisions = Object.entries(node.decisions)
      .map(([key, value]) => {
        const chosen = [...value.selected, ...(value.custom ? [value.custom] : [])];
        return `<li class="decision" data-key="${escapeHtml(key)}">
          <b>${escapeHtml(key)}</b>: ${escapeHtml(chosen.join("; "))}</li>`;
      })
      .join("");
    return `
      <div id="detail-panel" data-node-id="${this.detailNodeId}">
        <h3>${escapeHtml(node.label)}</h3>
        <ul>${decisions || "<li class='no-decisions'>no decisions yet</li>"}</ul>
      </div>`;
  }

  private renderProgress(): string {
    if (!this.progress) {
      return "";
    }
    // the budget display never renders above the limit
    const asked = Math.min(this.progress.asked, this.progress.limit);
    return `<div id="progress">${asked}/${this.progress.limit}</div>`;
  }

  private renderAnsweredList(): string {
    const entries = this.answered
      .map((entry, i) => {
        const revisable = entry.question.decision_key !== null;
        const summary =
          entry.answer.variant === "selected"
            ? (entry.answer.selected ?? []).map((j) => entry.question.options[j]).join(", ")
            : entry.answer.variant === "custom"
              ? (entry.answer.custom ?? "")
              : entry.answer.variant;
        return `
        <li class="answered-entry" data-question-id="${entry.question.id}">
          <span class="answered-text">${escapeHtml(entry.question.text)}</span>
          <span class="answered-answer">${escapeHtml(summary)}</span>
          ${revisable ? `<button class="edit-answer" data-index="${i}">edit</button>` : ""}
        </li>`;
      })
      .join("");
    return `<ol id="answered-list">${entries}</ol>`;
  }

  private renderQuestion(): string {
    const controls = `
      <div id="session-controls">
        <label>Mode
          <select id="mode-select">
            ${["auto", "explore", "exploit"]
              .map((m) => `<option value="${m}" ${m === this.mode ? "selected" : ""}>${m}</option>`)
              .join("")}
          </select>
        </label>
        <button id="toggle-graph">${this.graphHidden ? "Show graph" : "Hide graph"}</button>
        <button id="stop-btn" ${this.busy ? "disabled" : ""}>Stop</button>
        ${this.renderProgress()}
      </div>`;

    if (this.terminatedReason) {
      return `
        <section id="question-screen">
          ${controls}
          <div id="termination-prompt">
            <p>Question loop finished: <b id="termination-reason">${escapeHtml(this.terminatedReason)}</b></p>
            <button id="resume-btn" ${this.busy ? "disabled" : ""}>Continue asking</button>
            <button id="assess-btn" ${this.busy ? "disabled" : ""}>Go to assessment</button>
          </div>
          ${this.renderGraphPane()}
          ${this.renderAnsweredList()}
        </section>`;
    }

    const question = this.question;
    const questionBlock = question
      ? `
      <div id="question-card" data-question-id="${question.id}" data-question-kind="${question.kind}">
        <p id="question-text">${escapeHtml(question.text)}</p>
        <ul id="options">
          ${question.options
            .map(
              (option, i) => `
              <li class="option">
                <label><input type="checkbox" class="option-box" data-index="${i}" />
                ${escapeHtml(option)}</label>
              </li>`,
            )
            .join("")}
        </ul>
        <button id="submit-answer" ${this.busy ? "disabled" : ""}>Submit</button>
        <input id="custom-input" type="text" placeholder="Custom response" />
        <button id="submit-custom" ${this.busy ? "disabled" : ""}>Send custom</button>
        <button id="skip-btn" ${this.busy ? "disabled" : ""}>Skip</button>
      </div>`
      : `<div id="question-card" class="loading">Loading question…</div>`;

    return `
      <section id="question-screen">
        ${controls}
        ${questionBlock}
        ${this.renderGraphPane()}
        ${this.renderAnsweredList()}
      </section>`;
  }

  private renderAssessment(): string {
    const rows = this.rows
      .map((row, i) => {
        const issues = row.issues
          .map((issue, j) => {
            const discarded = issue.flag === "user-discarded";
            return `
            <li class="issue flag-${issue.flag} ${discarded ? "discarded" : ""}" data-issue="${j}">
              <span class="issue-text">${escapeHtml(issue.text)}</span>
              <button class="validate-issue" data-row="${i}" data-issue="${j}">validate</button>
              <button class="discard-issue" data-row="${i}" data-issue="${j}">discard</button>
            </li>`;
          })
          .join("");
        return `
        <tr class="assessment-row" data-row="${i}">
          <td><input class="cell-input" data-row="${i}" data-column="data_action"
                     value="${escapeHtml(row.data_action)}" /></td>
          <td><input class="cell-input" data-row="${i}" data-column="data"
                     value="${escapeHtml(row.data)}" /></td>
          <td><input class="cell-input" data-row="${i}" data-column="specific_context"
                     value="${escapeHtml(row.specific_context)}" /></td>
          <td>
            <ul class="issues">${issues}</ul>
            <input class="new-issue" data-row="${i}" placeholder="Add issue" />
            <button class="add-issue" data-row="${i}">add</button>
          </td>
        </tr>`;
      })
      .join("");
    return `
      <section id="assessment-screen">
        <h1>Privacy assessment</h1>
        <table id="assessment-table">
          <thead><tr>
            <th>Data Action</th><th>Data</th><th>Specific Context</th><th>Summary Issues</th>
          </tr></thead>
          <tbody>${rows}</tbody>
        </table>
        <button id="export-csv">Export csv</button>
        <button id="export-xlsx">Export xlsx</button>
        <button id="back-to-questions" ${this.busy ? "disabled" : ""}>Resume questions</button>
      </section>`;
  }

  // ------------------------------------------------------------ event wiring

  private wire(): void {
    const on = (selector: string, event: string, handler: (el: HTMLElement) => void) => {
      this.root.querySelectorAll<HTMLElement>(selector).forEach((el) => {
        el.addEventListener(event, () => handler(el));
      });
    };

    on("#start-btn", "click", () => {
      const goal = (this.root.querySelector("#goal-input") as HTMLInputElement).value;
      const seedRaw = (this.root.querySelector("#seed-input") as HTMLInputElement).value;
      void this.submitGoal(goal, seedRaw === "" ? undefined : Number(seedRaw));
    });
    on(".req-input", "change", (el) => {
      const input = el as HTMLInputElement;
      this.requirements[Number(input.dataset.index)] = input.value;
    });
    on("#confirm-reqs", "click", () => void this.confirmRequirements());

    on("#submit-answer", "click", () => {
      const indices = Array.from(
        this.root.querySelectorAll<HTMLInputElement>(".option-box"),
      )
        .filter((box) => box.checked)
        .map((box) => Number(box.dataset.index));
      void this.submitSelected(indices);
    });
    on("#submit-custom", "click", () => {
      const input = this.root.querySelector("#custom-input") as HTMLInputElement;
      void this.submitCustom(input.value);
    });
    on("#skip-btn", "click", () => void this.skip());
    on("#mode-select", "change", (el) => {
      void this.setMode((el as HTMLSelectElement).value);
    });
    on("#toggle-graph", "click", () => this.toggleGraph());
    on("#stop-btn", "click", () => void this.stopSession());
    on("#resume-btn", "click", () => void this.resume());
    on("#assess-btn", "click", () => void this.beginAssessment());
    on(".graph-node", "click", (el) => {
      void this.showDetail(el.dataset.nodeId as string);
    });
    on(".edit-answer", "click", (el) => {
      const entry = this.answered[Number(el.dataset.index)];
      const replacementRaw = window.prompt(
        `New option index for "${entry.question.text}"`,
        "0",
      );
      if (replacementRaw === null) {
        return;
      }
      void this.revise(entry.question.id, {
        question_id: entry.question.id,
        variant: "selected",
        selected: [Number(replacementRaw)],
      });
    });

    on(".cell-input", "change", (el) => {
      const input = el as HTMLInputElement;
      void this.applyEdit({
        row: Number(input.dataset.row),
        column: input.dataset.column as string,
        value: input.value,
      });
    });
    on(".add-issue", "click", (el) => {
      const row = Number(el.dataset.row);
      const input = this.root.querySelector<HTMLInputElement>(
        `.new-issue[data-row="${row}"]`,
      ) as HTMLInputElement;
      void this.applyEdit({ row, add_issue: input.value });
    });
    on(".validate-issue", "click", (el) => {
      void this.applyEdit({
        row: Number(el.dataset.row),
        issue: Number(el.dataset.issue),
        flag: "user-validated",
      });
    });
    on(".discard-issue", "click", (el) => {
      void this.applyEdit({
        row: Number(el.dataset.row),
        issue: Number(el.dataset.issue),
        flag: "user-discarded",
      });
    });
    on("#export-csv", "click", () => void this.exportWorksheet("csv"));
    on("#export-xlsx", "click", () => void this.exportWorksheet("xlsx"));
    on("#back-to-questions", "click", () => void this.resume());
  }
}
