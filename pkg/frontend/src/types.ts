/** Wire types for the elicitation service HTTP API. */

export interface FlowNode {
  id: string;
  kind: string;
  label: string;
}

export interface InteractionNode extends FlowNode {
  attached_to: string;
}

export interface GraphOverview {
  data_flow: FlowNode[];
  interactions: InteractionNode[];
}

export interface NodeDetail {
  label: string;
  kind: string;
  decisions: Record<string, { selected: string[]; custom: string | null }>;
}

export interface Question {
  id: string;
  kind: string;
  text: string;
  options: string[];
  target_node: string | null;
  decision_key: string | null;
  proposed_kind: string | null;
  origin: string | null;
}

export interface Progress {
  asked: number;
  limit: number;
}

export type QuestionResponse =
  | { terminated: true; reason: string }
  | { terminated: false; question: Question; progress: Progress };

export interface Answer {
  question_id: string;
  variant: "selected" | "custom" | "skip" | "revise";
  selected?: number[];
  custom?: string | null;
  revised?: Answer | null;
}

export interface CreateSessionResponse {
  session_id: string;
  requirements: string[];
  initial_graph: GraphOverview;
  domain_labels: string[];
}

export interface AnswerResponse {
  graph_delta: unknown[];
  graph: GraphOverview;
  progress: Progress;
}

export interface Issue {
  text: string;
  flag: string;
}

export interface AssessmentRow {
  node_id: string;
  data_action: string;
  data: string;
  specific_context: string;
  issues: Issue[];
  provider_warning: boolean;
}

export type AssessmentEdit =
  | { row: number; column: string; value: string }
  | { row: number; add_issue: string }
  | { row: number; issue: number; flag: "user-validated" | "user-discarded" };

export interface Representation {
  overview: GraphOverview;
  detail: Record<string, NodeDetail>;
  session: SessionView;
}

export interface SessionView {
  session_id: string;
  stage: string;
  mode: string;
  questions_asked: number;
  question_limit: number;
  terminated: string | null;
  requirements: string[];
  domain_labels: string[];
  graph: GraphOverview;
}
