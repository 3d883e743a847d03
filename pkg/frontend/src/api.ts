// Typed client for the workstation gateway. The console talks to the
// service exclusively through this module; it never touches storage.

export interface ApiError {
  code: string;
  message: string;
  details?: Record<string, unknown>;
}

export class GatewayError extends Error {
  readonly code: string;
  readonly details: Record<string, unknown>;

  constructor(err: ApiError, readonly status: number) {
    super(err.message);
    this.code = err.code;
    this.details = err.details ?? {};
  }
}

export interface Patient {
  id: string;
  name: string;
  date_of_birth: string;
  mother_name: string;
  father_name: string;
  gestational_week_at_birth: number;
  corrected_age_at_registration: number;
  birth_weight: number;
  discharge_diagnosis: string;
}

export interface TemplateOption {
  id: string;
  label: string;
  score: number;
  image_ref: string | null;
}

export interface ExamItem {
  id: string;
  name: string;
  section: string;
  templates: TemplateOption[];
}

export interface Catalog {
  category: string;
  schedule_months: number[];
  items: ExamItem[];
}

export interface MediaRef {
  hash: string;
  kind: string;
  width: number;
  height: number;
  frame_count: number;
  fps: number;
  camera_tag: string | null;
}

export interface ItemResultView {
  item_id: string;
  selected_template_id: string;
  score: number;
  note: string;
  media: MediaRef[];
}

export interface SessionView {
  session_id: string;
  category: string;
  timestamp: string;
  month_mark: number | null;
  status: string;
  age_at_exam: number;
  version: number;
  items: ItemResultView[];
  total: number;
  incomplete: boolean | null;
}

export interface StartedSession {
  id: string;
  patient_id: string;
  category: string;
  status: string;
  version: number;
  month_mark: number | null;
}

export interface StagePreview {
  media: MediaRef;
  preview_png: string;
}

export interface SkeletonizeResult {
  input: StagePreview;
  stages: {
    initial_segments: StagePreview;
    merged_segments: StagePreview;
    silhouette: StagePreview;
    skeleton: StagePreview;
  };
  region_counts: { initial: number; merged: number };
}

export interface CloseSummary {
  session_id: string;
  items: { item_id: string; score: number }[];
  total: number;
  incomplete: boolean;
}

async function unwrap<T>(response: Response): Promise<T> {
  if (response.ok) {
    return (await response.json()) as T;
  }
  let err: ApiError;
  try {
    err = (await response.json()) as ApiError;
  } catch {
    err = { code: "UNKNOWN", message: `HTTP ${response.status}` };
  }
  throw new GatewayError(err, response.status);
}

export class GatewayClient {
  constructor(readonly base: string = "") {}

  private url(path: string): string {
    return this.base + path;
  }

  async health(): Promise<{ status: string; catalog_version: string }> {
    return unwrap(await fetch(this.url("/health")));
  }

  async registerPatient(fields: Record<string, unknown>): Promise<Patient> {
    return unwrap(
      await fetch(this.url("/patients"), {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(fields),
      }),
    );
  }

  async getPatient(id: string): Promise<Patient> {
    return unwrap(await fetch(this.url(`/patients/${encodeURIComponent(id)}`)));
  }

  async getHistory(patientId: string): Promise<{ patient_id: string; sessions: SessionView[] }> {
    return unwrap(
      await fetch(this.url(`/patients/${encodeURIComponent(patientId)}/history`)),
    );
  }

  async getCatalog(category: string): Promise<Catalog> {
    return unwrap(await fetch(this.url(`/catalog/${encodeURIComponent(category)}`)));
  }

  async startSession(patientId: string, category: string): Promise<StartedSession> {
    return unwrap(
      await fetch(this.url("/sessions"), {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ patient_id: patientId, category }),
      }),
    );
  }

  async recordItem(
    sessionId: string,
    itemId: string,
    templateId: string,
    media: string[] = [],
    expectedVersion?: number,
  ): Promise<{ item: ItemResultView; version: number }> {
    return unwrap(
      await fetch(this.url(`/sessions/${encodeURIComponent(sessionId)}/items`), {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({
          item_id: itemId,
          template_id: templateId,
          media,
          expected_version: expectedVersion,
        }),
      }),
    );
  }

  async closeSession(sessionId: string): Promise<CloseSummary> {
    return unwrap(
      await fetch(this.url(`/sessions/${encodeURIComponent(sessionId)}/close`), {
        method: "POST",
      }),
    );
  }

  async skeletonize(bytes: ArrayBuffer | Uint8Array): Promise<SkeletonizeResult> {
    return unwrap(
      await fetch(this.url("/pipeline/skeletonize"), {
        method: "POST",
        headers: { "content-type": "application/octet-stream" },
        body: bytes as BodyInit,
      }),
    );
  }

  async uploadFrame(bytes: ArrayBuffer | Uint8Array, cameraTag?: string): Promise<MediaRef> {
    const query = cameraTag ? `?camera_tag=${encodeURIComponent(cameraTag)}` : "";
    return unwrap(
      await fetch(this.url(`/media/frames${query}`), {
        method: "POST",
        headers: { "content-type": "application/octet-stream" },
        body: bytes as BodyInit,
      }),
    );
  }

  mediaUrl(hash: string, index?: number): string {
    return this.url(index === undefined ? `/media/${hash}` : `/media/${hash}/${index}`);
  }
}
