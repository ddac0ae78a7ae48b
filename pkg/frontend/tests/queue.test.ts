import { describe, expect, it } from "vitest";

import { ApiError } from "../src/api.js";
import { MemoryStorage, OfflineQueue } from "../src/queue.js";
import type { LabelRecord } from "../src/types.js";

function record(term: string): LabelRecord {
  return { rater_id: "r1", term, schema: "V2", class: "Irrelevant", tags: [] };
}

describe("OfflineQueue", () => {
  it("persists before posting and drains in order", async () => {
    const posted: string[] = [];
    const storage = new MemoryStorage();
    const queue = new OfflineQueue(async (r) => {
      posted.push(r.term);
      return "ok";
    }, storage);
    queue.enqueue(record("a"));
    queue.enqueue(record("b"));
    expect(storage.load().map((r) => r.term)).toEqual(["a", "b"]);
    const result = await queue.flush();
    expect(result).toMatchObject({ sent: 2, remaining: 0 });
    expect(posted).toEqual(["a", "b"]);
    expect(storage.load()).toEqual([]);
  });

  it("keeps everything from the first network failure on", async () => {
    let online = false;
    const posted: string[] = [];
    const queue = new OfflineQueue(async (r) => {
      if (!online) throw new TypeError("fetch failed");
      posted.push(r.term);
      return "ok";
    });
    queue.enqueue(record("a"));
    queue.enqueue(record("b"));
    const offline = await queue.flush();
    expect(offline).toMatchObject({ sent: 0, remaining: 2 });
    online = true;
    const recovered = await queue.flush();
    expect(recovered).toMatchObject({ sent: 2, remaining: 0 });
    expect(posted).toEqual(["a", "b"]);
  });

  it("drops and reports records the server rejects", async () => {
    const queue = new OfflineQueue(async (r) => {
      if (r.term === "bad") throw new ApiError(400, "invalid record");
      return "ok";
    });
    queue.enqueue(record("bad"));
    queue.enqueue(record("good"));
    const result = await queue.flush();
    expect(result.sent).toBe(1);
    expect(result.rejected).toHaveLength(1);
    expect(result.rejected[0].record.term).toBe("bad");
    expect(result.remaining).toBe(0);
  });

  it("treats idempotent duplicates as acknowledged", async () => {
    const queue = new OfflineQueue(async () => "duplicate");
    queue.enqueue(record("a"));
    const result = await queue.flush();
    expect(result).toMatchObject({ sent: 1, remaining: 0 });
  });

  it("reloads pending records from storage", async () => {
    const storage = new MemoryStorage();
    const dead = new OfflineQueue(async () => {
      throw new TypeError("offline");
    }, storage);
    dead.enqueue(record("a"));
    await dead.flush();

    const posted: string[] = [];
    const revived = new OfflineQueue(async (r) => {
      posted.push(r.term);
      return "ok";
    }, storage);
    expect(revived.size).toBe(1);
    await revived.flush();
    expect(posted).toEqual(["a"]);
  });

  it("serializes concurrent flushes", async () => {
    let inFlight = 0;
    let maxInFlight = 0;
    const queue = new OfflineQueue(async () => {
      inFlight += 1;
      maxInFlight = Math.max(maxInFlight, inFlight);
      await new Promise((resolve) => setTimeout(resolve, 1));
      inFlight -= 1;
      return "ok";
    });
    for (let i = 0; i < 6; i += 1) queue.enqueue(record(`t${i}`));
    const [a, b] = await Promise.all([queue.flush(), queue.flush()]);
    expect(maxInFlight).toBe(1);
    expect(a.sent + b.sent).toBe(6);
    expect(queue.size).toBe(0);
  });
});
