/**
 * End-to-end: a scripted browser session (happy-dom) labels a 20-term
 * manifest under schema V2 against a real spawned service process.
 * Covers: full label flow (clicks and keyboard), a mid-session
 * disconnect whose queued submissions flush on reconnect with zero
 * loss, byte-level equality of the server's rater file with the
 * uninterrupted expectation, and agreement-panel parity with the CLI
 * kappa command on the same files.
 */

import { ChildProcess, spawn, spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { MemoryStorage } from "../src/queue.js";
import { createApp, type AppHandle } from "../src/view.js";
import type { Category, V2Class } from "../src/types.js";

const TERMS = Array.from({ length: 20 }, (_, i) => `term ${String(i + 1).padStart(2, "0")}`);
const CLASSES: V2Class[] = ["VeryPertinent", "Pertinent", "Irrelevant"];

/** Deterministic labeling plan shared by the UI driver and the expectations. */
function planFor(index: number, offset: number): { cls: V2Class; tags: Category[] } {
  const cls = CLASSES[(index + offset) % 3];
  if (cls === "Irrelevant") return { cls, tags: [] };
  return cls === "VeryPertinent"
    ? { cls, tags: ["TM"] }
    : { cls, tags: ["OWT", "AV"] };
}

function expectedCsv(rater: string, offset: number): string {
  const lines = ["rater_id,term,class,tags"];
  TERMS.forEach((term, index) => {
    const plan = planFor(index, offset);
    lines.push(`${rater},${term},${plan.cls},${plan.tags.join("+")}`);
  });
  return lines.join("\n") + "\n";
}

const realFetch: typeof fetch = globalThis.fetch.bind(globalThis);
let offline = false;
const gatedFetch = (input: string, init?: RequestInit): Promise<Response> => {
  if (offline) return Promise.reject(new TypeError("network down (simulated)"));
  return realFetch(input, init);
};

const sleep = (ms: number) => new Promise((resolve) => setTimeout(resolve, ms));

async function waitReady(base: string, proc: ChildProcess): Promise<boolean> {
  for (let i = 0; i < 150; i += 1) {
    if (proc.exitCode !== null) return false;
    try {
      const response = await realFetch(`${base}/api/manifest`);
      if (response.ok) return true;
    } catch {
      // not listening yet
    }
    await sleep(100);
  }
  return false;
}

function click(id: string): void {
  const element = document.getElementById(id);
  if (!element) throw new Error(`no element #${id}`);
  (element as HTMLElement).click();
}

function textOf(id: string): string {
  return document.getElementById(id)?.textContent ?? "";
}

function pressKey(key: string): void {
  document.dispatchEvent(new KeyboardEvent("keydown", { key, bubbles: true }));
}

function labelViaDom(plan: { cls: V2Class; tags: Category[] }): void {
  click(`class-${plan.cls}`);
  for (const tag of plan.tags) click(`tag-${tag}`);
  click("submit-btn");
}

const KEY_OF: Record<string, string> = { VeryPertinent: "1", Pertinent: "2", Irrelevant: "3" };
const TAG_KEY: Record<Category, string> = { OWT: "o", TM: "t", AV: "a" };

function labelViaKeyboard(plan: { cls: V2Class; tags: Category[] }): void {
  pressKey(KEY_OF[plan.cls]);
  for (const tag of plan.tags) pressKey(TAG_KEY[tag]);
  pressKey("Enter");
}

describe("annotator end-to-end", () => {
  let dataDir: string;
  let proc: ChildProcess;
  let base: string;
  let app: AppHandle;

  beforeAll(async () => {
    dataDir = mkdtempSync(join(tmpdir(), "termlex-e2e-"));
    const manifest = {
      sample_id: "e2e",
      seed: 1,
      size: TERMS.length,
      ranking_digest: "e2e-digest",
      terms: TERMS,
    };
    writeFileSync(join(dataDir, "manifest.json"), JSON.stringify(manifest, null, 2) + "\n");

    for (let attempt = 0; attempt < 5; attempt += 1) {
      const port = 21000 + Math.floor(Math.random() * 20000);
      base = `http://127.0.0.1:${port}`;
      proc = spawn(
        "python3",
        ["-m", "termlex", "serve", "--data-dir", dataDir, "--port", String(port), "--schema", "V2"],
        { stdio: ["ignore", "pipe", "pipe"] },
      );
      if (await waitReady(base, proc)) break;
      proc.kill();
      if (attempt === 4) throw new Error("service did not start");
    }

    const root = document.createElement("div");
    document.body.append(root);
    app = createApp(root, new ApiClient(base, gatedFetch), {
      storage: new MemoryStorage(),
    });
  });

  afterAll(() => {
    proc?.kill();
  });

  it("labels all 20 terms, surviving a mid-session disconnect", async () => {
    await app.start("r1");
    expect(textOf("term-text")).toBe(TERMS[0]);
    expect(textOf("progress-text")).toContain("0 / 20");

    // online: seven terms via pointer clicks
    for (let i = 0; i < 7; i += 1) labelViaDom(planFor(i, 0));
    await app.flushQueue();
    expect(app.queue().size).toBe(0);

    // disconnect: seven more terms, mixing keyboard and pointer input;
    // submissions stay queued locally and the UI keeps advancing
    offline = true;
    for (let i = 7; i < 14; i += 1) {
      const plan = planFor(i, 0);
      if (i % 2 === 1) labelViaKeyboard(plan);
      else labelViaDom(plan);
    }
    await app.flushQueue();
    expect(app.queue().size).toBe(7);
    expect(textOf("queue-status")).toContain("offline");
    expect(textOf("progress-text")).toContain("14 / 20");

    // reconnect: the queue drains completely, nothing is lost
    offline = false;
    await app.flushQueue();
    expect(app.queue().size).toBe(0);
    expect(textOf("queue-status")).toContain("acknowledged");

    // finish the manifest online
    for (let i = 14; i < 20; i += 1) labelViaDom(planFor(i, 0));
    await app.flushQueue();
    expect(app.queue().size).toBe(0);
    expect(document.getElementById("done-text")).toBeTruthy();

    // the server file is byte-identical to an uninterrupted session
    const stored = readFileSync(join(dataDir, "labels", "r1.csv"), "utf-8");
    expect(stored).toBe(expectedCsv("r1", 0));

    // and the wire-level records match, in manifest order
    const labels = await (
      await realFetch(`${base}/api/labels?rater=r1`)
    ).json();
    expect(labels.records).toHaveLength(20);
    labels.records.forEach((record: { term: string; class: string; tags: string[] }, i: number) => {
      const plan = planFor(i, 0);
      expect(record.term).toBe(TERMS[i]);
      expect(record.class).toBe(plan.cls);
      expect(record.tags).toEqual([...plan.tags].sort());
    });
  });

  it("agreement panel shows the same kappa as the CLI on the same files", async () => {
    // a second rater completes the manifest through the plain API
    for (let i = 0; i < TERMS.length; i += 1) {
      const plan = planFor(i, 1);
      const response = await realFetch(`${base}/api/labels`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({
          rater_id: "r2",
          term: TERMS[i],
          schema: "V2",
          class: plan.cls,
          tags: plan.tags,
        }),
      });
      expect(response.status).toBe(200);
    }

    await app.showAgreement();
    const panelText = textOf("agreement-kappa");
    expect(panelText).toContain("Fleiss kappa");

    const service = await (
      await realFetch(`${base}/api/agreement?mapping=V2_three_class`)
    ).json();
    expect(panelText).toContain(service.kappa.toFixed(4));

    const reportPath = join(dataDir, "kappa.json");
    const cli = spawnSync("python3", [
      "-m", "termlex", "kappa",
      "--manifest", join(dataDir, "manifest.json"),
      "--labels-dir", join(dataDir, "labels"),
      "--schema", "V2",
      "--mapping", "V2_three_class",
      "--out", reportPath,
    ]);
    expect(cli.status).toBe(0);
    const cliPayload = JSON.parse(readFileSync(reportPath, "utf-8"));
    expect(cliPayload.report.kappa).toBeCloseTo(service.kappa, 12);
    expect(panelText).toContain(cliPayload.report.kappa.toFixed(4));
  });

  async function postLabel(rater: string, index: number, offset: number): Promise<void> {
    const plan = planFor(index, offset);
    const response = await realFetch(`${base}/api/labels`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({
        rater_id: rater,
        term: TERMS[index],
        schema: "V2",
        class: plan.cls,
        tags: plan.tags,
      }),
    });
    expect(response.status).toBe(200);
  }

  it("gates the panel while a rater is incomplete", async () => {
    // a third rater labels a single term and leaves
    await postLabel("r3", 0, 0);
    await app.showAgreement();
    const status = textOf("agreement-status");
    expect(status).toContain("awaiting raters");
    expect(status).toContain("r3 1/20");
  });

  it("shows kappa 1.00 for a clone subset once everyone is complete", async () => {
    // r3 finishes as an exact clone of r1 (same plan offset)
    for (let i = 1; i < TERMS.length; i += 1) await postLabel("r3", i, 0);

    // a fresh session for the finished rater lands on the done screen
    const root = document.createElement("div");
    document.body.append(root);
    const panelApp = createApp(root, new ApiClient(base, gatedFetch), {
      storage: new MemoryStorage(),
      subsetSize: 2,
    });
    await panelApp.start("r1");
    expect(root.querySelector("#done-text")).toBeTruthy();

    await panelApp.showAgreement();
    const best = root.querySelector("#best-subset")?.textContent ?? "";
    expect(best).toContain("r1, r3");
    expect(best).toContain("1.0000");
  });
});
