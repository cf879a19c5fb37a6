import type { CommitResponse, SessionSnapshot, TextureInfo } from './types.js';

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
  ) {
    super(`service responded ${status}: ${JSON.stringify(detail)}`);
    this.name = 'ApiError';
  }
}

interface QueuedMutation {
  label: string;
  run: () => Promise<Response>;
  resolve: (value: any) => void;
  reject: (err: unknown) => void;
}

export interface ClientOptions {
  fetchFn?: typeof fetch;
  /** delay between retries of a mutation that hit a network error */
  retryDelayMs?: number;
  /** called when a mutation fails to reach the server (retry banner hook) */
  onOffline?: (label: string, attempt: number) => void;
  /** called when the queue drains after an offline stretch */
  onOnline?: () => void;
}

/**
 * Typed client for the grouping service.
 *
 * Reads go straight through. Mutations run through a serial queue: if the
 * server is unreachable the mutation stays queued and is retried, so a
 * participant's clicks are never dropped and never reordered. HTTP error
 * responses (4xx/5xx) are real answers, not outages; those reject
 * immediately with ApiError and the queue moves on.
 */
export class ServiceClient {
  private fetchFn: typeof fetch;
  private retryDelayMs: number;
  private onOffline?: (label: string, attempt: number) => void;
  private onOnline?: () => void;
  private queue: QueuedMutation[] = [];
  private pumping = false;
  private wasOffline = false;

  constructor(
    readonly baseUrl: string,
    opts: ClientOptions = {},
  ) {
    this.fetchFn = opts.fetchFn ?? fetch;
    this.retryDelayMs = opts.retryDelayMs ?? 1500;
    this.onOffline = opts.onOffline;
    this.onOnline = opts.onOnline;
  }

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, '') + path;
  }

  audioUrl(texture: TextureInfo): string {
    return this.url(texture.audio_url);
  }

  maskingUrl(): string {
    return this.url('/masking-noise');
  }

  pendingMutations(): number {
    return this.queue.length;
  }

  async textures(sessionId?: string): Promise<TextureInfo[]> {
    const query = sessionId ? `?session_id=${encodeURIComponent(sessionId)}` : '';
    const body = await this.get(`/textures${query}`);
    return body.textures as TextureInfo[];
  }

  async createSession(participantId: string): Promise<SessionSnapshot> {
    return this.mutate('create session', '/sessions', {
      participant_id: participantId,
    });
  }

  async session(sessionId: string): Promise<SessionSnapshot> {
    return this.get(`/sessions/${encodeURIComponent(sessionId)}`);
  }

  async assign(
    sessionId: string,
    textureId: number,
    groupId: string | null,
  ): Promise<SessionSnapshot> {
    return this.mutate(
      `assign ${textureId}`,
      `/sessions/${encodeURIComponent(sessionId)}/assignments`,
      { texture_id: textureId, group_id: groupId },
    );
  }

  async commitRound(sessionId: string): Promise<CommitResponse> {
    return this.mutate(
      'commit round',
      `/sessions/${encodeURIComponent(sessionId)}/commit-round`,
      {},
    );
  }

  async submitNames(
    sessionId: string,
    names: Record<string, string>,
  ): Promise<SessionSnapshot> {
    return this.mutate(
      'submit names',
      `/sessions/${encodeURIComponent(sessionId)}/names`,
      { names },
    );
  }

  private async get(path: string): Promise<any> {
    const response = await this.fetchFn(this.url(path));
    if (!response.ok) {
      throw new ApiError(response.status, await readDetail(response));
    }
    return response.json();
  }

  private mutate(label: string, path: string, body: unknown): Promise<any> {
    return new Promise((resolve, reject) => {
      this.queue.push({
        label,
        resolve,
        reject,
        run: () =>
          this.fetchFn(this.url(path), {
            method: 'POST',
            headers: { 'content-type': 'application/json' },
            body: JSON.stringify(body),
          }),
      });
      void this.pump();
    });
  }

  private async pump(): Promise<void> {
    if (this.pumping) return;
    this.pumping = true;
    try {
      while (this.queue.length > 0) {
        const task = this.queue[0];
        let attempt = 0;
        let response: Response;
        for (;;) {
          try {
            response = await task.run();
            break;
          } catch {
            // network-level failure: keep the mutation, tell the UI, retry
            attempt += 1;
            this.wasOffline = true;
            this.onOffline?.(task.label, attempt);
            await sleep(this.retryDelayMs);
          }
        }
        this.queue.shift();
        if (response.ok) {
          task.resolve(await response.json());
        } else {
          task.reject(new ApiError(response.status, await readDetail(response)));
        }
      }
      if (this.wasOffline) {
        this.wasOffline = false;
        this.onOnline?.();
      }
    } finally {
      this.pumping = false;
    }
    // a mutation enqueued while we were resolving the last one
    if (this.queue.length > 0) void this.pump();
  }
}

async function readDetail(response: Response): Promise<unknown> {
  try {
    const body = await response.json();
    return body?.detail ?? body;
  } catch {
    return response.statusText;
  }
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}
