// Console state for one examination. The gateway is the single source of
// truth: everything here is reconstructable from gateway reads, so a page
// reload mid-exam loses nothing.

import type { Catalog, GatewayClient, Patient, SessionView, SkeletonizeResult } from "./api.js";

export interface StagePreviews {
  input: string;
  initial_segments: string;
  merged_segments: string;
  silhouette: string;
  skeleton: string;
}

export interface ExamConsoleState {
  patient: Patient;
  session: SessionView;
  catalog: Catalog;
  currentItemIndex: number;
  /** per-item selection drafts (clicked but not yet acknowledged) */
  drafts: Map<string, string>;
  /** data-URL preview of the latest uploaded frame, if any */
  framePreview: string | null;
  stagePreviews: StagePreviews | null;
  overlayOn: boolean;
  /** last known session version, for optimistic writes */
  version: number;
}

export function previewsFromResult(result: SkeletonizeResult): StagePreviews {
  const toUrl = (b64: string) => `data:image/png;base64,${b64}`;
  return {
    input: toUrl(result.input.preview_png),
    initial_segments: toUrl(result.stages.initial_segments.preview_png),
    merged_segments: toUrl(result.stages.merged_segments.preview_png),
    silhouette: toUrl(result.stages.silhouette.preview_png),
    skeleton: toUrl(result.stages.skeleton.preview_png),
  };
}

export function firstUnrecordedIndex(catalog: Catalog, session: SessionView): number {
  const recorded = new Set(session.items.map((item) => item.item_id));
  const index = catalog.items.findIndex((item) => !recorded.has(item.id));
  return index === -1 ? catalog.items.length - 1 : index;
}

/** Rebuild the whole console state from gateway reads alone. */
export async function reconstructExamState(
  client: GatewayClient,
  patientId: string,
  sessionId: string,
): Promise<ExamConsoleState> {
  const patient = await client.getPatient(patientId);
  const history = await client.getHistory(patientId);
  const session = history.sessions.find((s) => s.session_id === sessionId);
  if (!session) {
    throw new Error(`session ${sessionId} not found for patient ${patientId}`);
  }
  const catalog = await client.getCatalog(session.category);
  return {
    patient,
    session,
    catalog,
    currentItemIndex: firstUnrecordedIndex(catalog, session),
    drafts: new Map(),
    framePreview: null,
    stagePreviews: null,
    overlayOn: false,
    version: session.version,
  };
}

export async function refreshSession(
  client: GatewayClient,
  state: ExamConsoleState,
): Promise<void> {
  const history = await client.getHistory(state.patient.id);
  const session = history.sessions.find((s) => s.session_id === state.session.session_id);
  if (session) {
    state.session = session;
    state.version = session.version;
  }
}
