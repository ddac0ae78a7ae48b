/** Offline-safe submission queue.
 *
 * Every submission is enqueued and persisted before the network is
 * touched, so a disconnect can never lose a rater's work. Flushing
 * posts records in order: acknowledged ("ok" or idempotent "duplicate")
 * records leave the queue, rejected records (4xx) are dropped and
 * surfaced, and a network failure stops the flush with the remainder
 * intact for the next reconnect.
 */

import { ApiError } from "./api.js";
import type { LabelRecord } from "./types.js";

export interface QueueStorage {
  load(): LabelRecord[];
  save(records: LabelRecord[]): void;
}

export class MemoryStorage implements QueueStorage {
  private records: LabelRecord[] = [];
  load(): LabelRecord[] {
    return [...this.records];
  }
  save(records: LabelRecord[]): void {
    this.records = [...records];
  }
}

export class BrowserStorage implements QueueStorage {
  constructor(private readonly key: string) {}
  load(): LabelRecord[] {
    const raw = window.localStorage.getItem(this.key);
    if (!raw) return [];
    try {
      return JSON.parse(raw) as LabelRecord[];
    } catch {
      return [];
    }
  }
  save(records: LabelRecord[]): void {
    window.localStorage.setItem(this.key, JSON.stringify(records));
  }
}

export interface FlushResult {
  sent: number;
  rejected: { record: LabelRecord; detail: string }[];
  remaining: number;
}

export class OfflineQueue {
  private pending: LabelRecord[];
  private chain: Promise<unknown> = Promise.resolve();

  constructor(
    private readonly post: (record: LabelRecord) => Promise<string>,
    private readonly storage: QueueStorage = new MemoryStorage(),
  ) {
    this.pending = storage.load();
  }

  get size(): number {
    return this.pending.length;
  }

  enqueue(record: LabelRecord): void {
    this.pending.push(record);
    this.storage.save(this.pending);
  }

  /** Drain the queue. Concurrent calls serialize; awaiting any call
   * guarantees a full drain pass started at or after that call. */
  flush(): Promise<FlushResult> {
    const next = this.chain.then(() => this.drain());
    this.chain = next.catch(() => undefined);
    return next;
  }

  private async drain(): Promise<FlushResult> {
    const result: FlushResult = { sent: 0, rejected: [], remaining: 0 };
    while (this.pending.length > 0) {
      const record = this.pending[0];
      try {
        await this.post(record);
        result.sent += 1;
      } catch (error) {
        if (error instanceof ApiError) {
          // the server refused this record; retrying cannot help
          result.rejected.push({ record, detail: error.message });
        } else {
          break; // network failure: keep everything from here on
        }
      }
      this.pending.shift();
      this.storage.save(this.pending);
    }
    result.remaining = this.pending.length;
    return result;
  }
}
