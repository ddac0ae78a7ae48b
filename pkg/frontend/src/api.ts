/** Typed client for the annotation service endpoints. */

import type {
  AgreementResponse,
  AgreementResult,
  LabelRecord,
  Manifest,
  ProgressInfo,
} from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
    this.name = "ApiError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function detailOf(response: Response): Promise<string> {
  try {
    const body = await response.json();
    if (typeof body?.detail === "string") return body.detail;
    return JSON.stringify(body);
  } catch {
    return response.statusText;
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    // a thrown TypeError here means "network down"; callers rely on that
    const response = await this.fetchImpl(this.baseUrl + path, init);
    return response;
  }

  async getManifest(): Promise<Manifest> {
    const response = await this.request("/api/manifest");
    if (!response.ok) throw new ApiError(response.status, await detailOf(response));
    return (await response.json()) as Manifest;
  }

  async getUnlabeledTerms(raterId: string): Promise<string[]> {
    const response = await this.request(
      `/api/terms?rater=${encodeURIComponent(raterId)}`,
    );
    if (!response.ok) throw new ApiError(response.status, await detailOf(response));
    const body = await response.json();
    return body.terms as string[];
  }

  /** Resolves to "ok" or "duplicate"; rejects with ApiError on 4xx. */
  async postLabel(record: LabelRecord): Promise<string> {
    const response = await this.request("/api/labels", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(record),
    });
    if (!response.ok) throw new ApiError(response.status, await detailOf(response));
    const body = await response.json();
    return body.status as string;
  }

  async getLabels(raterId: string): Promise<LabelRecord[]> {
    const response = await this.request(
      `/api/labels?rater=${encodeURIComponent(raterId)}`,
    );
    if (!response.ok) throw new ApiError(response.status, await detailOf(response));
    const body = await response.json();
    return body.records as LabelRecord[];
  }

  async getProgress(): Promise<ProgressInfo> {
    const response = await this.request("/api/progress");
    if (!response.ok) throw new ApiError(response.status, await detailOf(response));
    return (await response.json()) as ProgressInfo;
  }

  async getAgreement(
    mapping: string,
    subsetSize?: number,
  ): Promise<AgreementResponse> {
    let path = `/api/agreement?mapping=${encodeURIComponent(mapping)}`;
    if (subsetSize !== undefined) path += `&subset_size=${subsetSize}`;
    const response = await this.request(path);
    if (response.status === 409) {
      const body = await response.json();
      return { status: "incomplete", total: body.total, raters: body.raters };
    }
    if (!response.ok) throw new ApiError(response.status, await detailOf(response));
    const result = (await response.json()) as AgreementResult;
    return { status: "ok", result };
  }
}
