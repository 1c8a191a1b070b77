export interface ChallengePayload {
  id: string;
  question: string;
  answer_hash: string;
  expires_at: number;
}

export interface TracePayload {
  timestamps: number[];
  paste_flagged: boolean;
}

export interface VerifyRequest {
  challenge_id: string;
  typed_text: string;
  trace: TracePayload;
}

export interface VerifyResult {
  decision: "human" | "bot" | "error";
  reason: string;
  retry_allowed: boolean;
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(message: string, readonly status?: number) {
    super(message);
    this.name = "ApiError";
  }
}

const postJson = async (
  fetchImpl: FetchLike,
  url: string,
  body: unknown,
): Promise<unknown> => {
  let response: Response;
  try {
    response = await fetchImpl(url, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  } catch (err) {
    throw new ApiError(`network failure: ${String(err)}`);
  }
  if (!response.ok) {
    throw new ApiError(`HTTP ${response.status}`, response.status);
  }
  return response.json();
};

export class CaptchaApi {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  async fetchChallenge(category?: string): Promise<ChallengePayload> {
    const body = category ? { category } : {};
    const payload = (await postJson(
      this.fetchImpl,
      `${this.baseUrl}/api/challenge`,
      body,
    )) as ChallengePayload;
    if (!payload.id || !payload.question || !payload.answer_hash) {
      throw new ApiError("malformed challenge payload");
    }
    return payload;
  }

  async verify(request: VerifyRequest): Promise<VerifyResult> {
    return (await postJson(
      this.fetchImpl,
      `${this.baseUrl}/api/verify`,
      request,
    )) as VerifyResult;
  }
}
