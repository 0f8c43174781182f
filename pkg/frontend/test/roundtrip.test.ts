/** Live round trip: drive the UI controller against the real Python server on
 * the bundled showcase corpus and check the session lands exactly where the
 * simulated user does, with identical server-reported effort. */

import { spawn, spawnSync, ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { SessionController } from "../src/session.js";

const ROOT = resolve(__dirname, "..", "..");
const PYTHON = process.env.PYTHON ?? "python3";
const REFERENCE = "A group of people sit on a bench under an umbrella.";

let corpusDir: string;
let server: ChildProcess | null = null;
let base: string;

async function waitForServer(url: string, tries = 120): Promise<void> {
  for (let i = 0; i < tries; i += 1) {
    try {
      const response = await fetch(`${url}/samples`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error(`server at ${url} never became ready`);
}

beforeAll(async () => {
  corpusDir = mkdtempSync(join(tmpdir(), "ipredict-demo-"));
  const made = spawnSync(PYTHON, ["scripts/make_demo_corpus.py", corpusDir],
                         { cwd: ROOT, encoding: "utf-8" });
  if (made.status !== 0) throw new Error(`corpus build failed: ${made.stderr}`);
  const port = 20000 + Math.floor(Math.random() * 20000);
  base = `http://127.0.0.1:${port}`;
  server = spawn(PYTHON, ["-m", "ipredict", "serve", "--corpus", corpusDir,
                          "--scorer", "nbest", "--port", String(port)],
                 { cwd: ROOT, stdio: ["ignore", "pipe", "pipe"] });
  await waitForServer(base);
});

afterAll(() => {
  server?.kill();
  rmSync(corpusDir, { recursive: true, force: true });
});

function simulatorReport(): { ksmr: number; keystrokes: number } {
  const run = spawnSync(PYTHON, ["-m", "ipredict", "simulate", "--corpus", corpusDir,
                                 "--scorer", "nbest"],
                        { cwd: ROOT, encoding: "utf-8" });
  if (run.status !== 0) throw new Error(`simulate failed: ${run.stderr}`);
  const report = JSON.parse(run.stdout);
  return {
    ksmr: report.interactive.ksmr,
    keystrokes: report.interactive.counts.keystrokes,
  };
}

describe("UI round trip on the showcase corpus", () => {
  it("reaches the exact target caption with the same KSMR as the simulator", async () => {
    const controller = new SessionController(new ApiClient(base));
    await controller.create({ sample_id: "demo" });
    expect(controller.view.error).toBeNull();
    expect(controller.view.hypothesis).toBe("A group of people sit on a ramp.");

    // the scripted user: click the first wrong character, type the correction
    const script: Array<[number, string]> = [[27, "b"], [33, "u"], [40, "n"]];
    for (const [position, character] of script) {
      controller.setCaret(position);
      controller.typeCharacter(character);
      while (controller.pendingCount > 0) {
        await new Promise((resolve) => setTimeout(resolve, 10));
      }
      expect(controller.view.error).toBeNull();
    }
    expect(controller.view.hypothesis).toBe(REFERENCE);
    expect(controller.view.validatedPrefixChars).toBe(41); // "...under a" + "n"
    expect(controller.view.keystrokes).toBe(3);
    expect(controller.view.mouseActions).toBe(3);

    await controller.accept();
    expect(controller.view.accepted).toBe(true);
    expect(controller.view.mouseActions).toBe(4); // plus the acceptance action

    const simulator = simulatorReport();
    expect(controller.view.keystrokes).toBe(simulator.keystrokes);
    expect(controller.view.ksmr).toBeCloseTo(simulator.ksmr, 10);
    expect(controller.view.ksmr).toBeCloseTo((100 * 7) / REFERENCE.length, 10);
  }, 120_000);

  it("create is deterministic across sessions", async () => {
    const api = new ApiClient(base);
    const one = await api.createSession({ sample_id: "demo" });
    const two = await api.createSession({ sample_id: "demo" });
    expect(one.id).not.toBe(two.id);
    expect(one.hypothesis).toBe(two.hypothesis);
  });
});
