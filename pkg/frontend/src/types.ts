/** Wire types mirroring the backend's documented JSON schemas. */

export interface SchemaLabel {
  key: string;
  name: string;
  definition: string;
  example: string;
}

export interface Schema {
  version: string;
  labels: SchemaLabel[];
}

export interface TokenJson {
  text: string;
  lang: string; // eng | spa | hin | ambiguous | other
  explicit: boolean;
}

export interface UtteranceJson {
  line_no: number;
  speaker: string;
  tokens: TokenJson[];
}

export interface InstanceJson {
  id: string;
  transcript_id: string;
  focus_line: number;
  context: UtteranceJson[];
  switch_points: [number, number][]; // (utterance_offset, token_index)
  text: string;
}

export interface AnnotationRecordJson {
  instance_id: string;
  annotator_id: string;
  labels: Record<string, boolean>;
  created_at?: string;
  schema_version?: string;
}

export interface QueueItem {
  id: string;
  text: string;
  labeled: boolean;
}

export interface QueueResponse {
  instances: QueueItem[];
  total: number;
}

export interface InstanceResponse {
  instance: InstanceJson;
  record: AnnotationRecordJson | null;
}

export interface AgreementLabelStats {
  accuracy: number;
  kappa: number | null;
}

export interface AgreementResponse {
  complete: boolean;
  n_instances: number;
  per_label?: Record<string, AgreementLabelStats>;
  missing?: { instance_id: string; annotator_id: string }[];
}

export interface ProgressResponse {
  annotator: string;
  completed: number;
  remaining: number;
  total: number;
}
