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
export class MemoryStorage {
    constructor() {
        this.records = [];
    }
    load() {
        return [...this.records];
    }
    save(records) {
        this.records = [...records];
    }
}
export class BrowserStorage {
    constructor(key) {
        this.key = key;
    }
    load() {
        const raw = window.localStorage.getItem(this.key);
        if (!raw)
            return [];
        try {
            return JSON.parse(raw);
        }
        catch {
            return [];
        }
    }
    save(records) {
        window.localStorage.setItem(this.key, JSON.stringify(records));
    }
}
export class OfflineQueue {
    constructor(post, storage = new MemoryStorage()) {
        this.post = post;
        this.storage = storage;
        this.chain = Promise.resolve();
        this.pending = storage.load();
    }
    get size() {
        return this.pending.length;
    }
    enqueue(record) {
        this.pending.push(record);
        this.storage.save(this.pending);
    }
    /** Drain the queue. Concurrent calls serialize; awaiting any call
     * guarantees a full drain pass started at or after that call. */
    flush() {
        const next = this.chain.then(() => this.drain());
        this.chain = next.catch(() => undefined);
        return next;
    }
    async drain() {
        const result = { sent: 0, rejected: [], remaining: 0 };
        while (this.pending.length > 0) {
            const record = this.pending[0];
            try {
                await this.post(record);
                result.sent += 1;
            }
            catch (error) {
                if (error instanceof ApiError) {
                    // the server refused this record; retrying cannot help
                    result.rejected.push({ record, detail: error.message });
                }
                else {
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
