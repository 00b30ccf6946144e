/**
 * Typed client for the workbench API.
 *
 * The UI never computes indicator values itself: every number shown comes
 * from these endpoints, so the UI and the batch CLI can never disagree.
 * Selection queries are raced behind a generation counter; a response that
 * arrives after a newer request has been issued is dropped.
 */

export interface Meta {
  n: number;
  k_max: number;
  bins: number;
  bin_min: number;
  bin_width: number;
  gamma: number;
  metrics: { input: string; output: string };
  has_labels: boolean;
  has_embedding: boolean;
}

export interface Grid {
  bins: number;
  kMax: number;
  binMin: number;
  binWidth: number;
  /** row-major bins x k, row 0 = lowest value bin */
  values: Float64Array;
}

export interface Region {
  kMin: number;
  kMax: number;
  vMin: number;
  vMax: number;
}

export interface Selection {
  ids: number[];
  count: number;
  truncated: boolean;
}

export interface PointDetail {
  id: number;
  label: number | string | null;
  output_values: number[];
  trajectory: [number, number][];
  input_preview?: string;      // base64 PNG for image datasets
  input_values?: number[];     // tabular datasets
  embedding_xy?: [number, number];
}

export interface DetectEvidence {
  id: number;
  evidence: [number, number][];
}

export interface DetectReport {
  detector: string;
  config: Record<string, unknown>;
  flagged: DetectEvidence[];
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

async function getJson<T>(url: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(url, init);
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      const body = await resp.json();
      if (body && typeof body.detail === "string") detail = body.detail;
    } catch {
      /* non-JSON error body */
    }
    throw new ApiError(resp.status, detail);
  }
  return (await resp.json()) as T;
}

/** Decode the base64 little-endian float64 grid payload. */
export function decodeGrid(b64: string, bins: number, kMax: number): Float64Array {
  const raw = atob(b64);
  const bytes = new Uint8Array(raw.length);
  for (let i = 0; i < raw.length; i++) bytes[i] = raw.charCodeAt(i);
  const values = new Float64Array(bytes.buffer);
  if (values.length !== bins * kMax) {
    throw new Error(`grid payload holds ${values.length} cells, expected ${bins * kMax}`);
  }
  return values;
}

export class ApiClient {
  private selectGeneration = 0;
  private selectAbort: AbortController | null = null;

  constructor(readonly base: string = "") {}

  meta(): Promise<Meta> {
    return getJson<Meta>(`${this.base}/api/meta`);
  }

  async grid(): Promise<Grid> {
    interface Payload {
      bins: number;
      k_max: number;
      bin_min: number;
      bin_width: number;
      data_b64: string;
    }
    const p = await getJson<Payload>(`${this.base}/api/shlqi2`, {
      headers: { accept: "application/json" },
    });
    return {
      bins: p.bins,
      kMax: p.k_max,
      binMin: p.bin_min,
      binWidth: p.bin_width,
      values: decodeGrid(p.data_b64, p.bins, p.k_max),
    };
  }

  /**
   * Region -> ids. Superseded calls are aborted and their results are
   * never delivered: the resolved value is null for stale responses.
   */
  async select(region: Region): Promise<Selection | null> {
    const generation = ++this.selectGeneration;
    this.selectAbort?.abort();
    this.selectAbort = new AbortController();
    let result: Selection;
    try {
      result = await getJson<Selection>(`${this.base}/api/select`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({
          k_min: region.kMin,
          k_max: region.kMax,
          v_min: region.vMin,
          v_max: region.vMax,
        }),
        signal: this.selectAbort.signal,
      });
    } catch (err) {
      if ((err as Error).name === "AbortError") return null;
      throw err;
    }
    return generation === this.selectGeneration ? result : null;
  }

  point(id: number): Promise<PointDetail> {
    return getJson<PointDetail>(`${this.base}/api/point/${id}`);
  }

  /** Only non-default knobs travel as query parameters. */
  detect(
    name: string,
    overrides: Record<string, number> = {},
    signal?: AbortSignal,
  ): Promise<DetectReport> {
    const params = new URLSearchParams();
    for (const [key, value] of Object.entries(overrides)) {
      params.set(key, String(value));
    }
    const query = params.toString();
    const url = `${this.base}/api/detect/${name}${query ? `?${query}` : ""}`;
    return getJson<DetectReport>(url, { signal });
  }
}
