// End-to-end: run the real backend over the Observer corpus and drive it
// through the UI's own client and renderers.

import { execFileSync, spawn, ChildProcess } from "node:child_process";
import { copyFileSync, mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { renderDiff, renderInstance, renderTree } from "../src/render.js";
import type { TreeComposite } from "../src/types.js";

const REPO = resolve(__dirname, "..", "..");
const PY = "python3";

let work: string;
let server: ChildProcess | null = null;
let base = "";
let client: ApiClient;

function cli(args: string[]): void {
  execFileSync(PY, ["-m", "soquet.cli", ...args], { cwd: REPO });
}

beforeAll(async () => {
  work = mkdtempSync(join(tmpdir(), "soquet-ui-"));
  const src = join(work, "src");
  execFileSync("mkdir", ["-p", src]);
  copyFileSync(join(REPO, "corpus", "patterns", "observer.oosl"),
               join(src, "observer.oosl"));
  const facts = join(work, "facts.jsonl");
  const model = join(work, "model.json");
  cli(["extract", "--source", src, "--out", facts]);
  cli(["model", "new", "ObserverConcerns", "--model", model,
       "--facts", facts]);
  cli(["pattern", "observer", "--facts", facts,
       "--bindings", join(REPO, "corpus", "bindings", "observer.json"),
       "--model", model, "--composite", "FigureChanged"]);

  server = spawn(PY, ["-m", "soquet.cli", "serve", "--facts", facts,
                      "--model", model, "--port", "0",
                      "--source-root", src],
                 { cwd: REPO });
  base = await new Promise<string>((resolvePort, reject) => {
    let buffer = "";
    const timer = setTimeout(
      () => reject(new Error(`server did not start: ${buffer}`)), 15000);
    server!.stdout!.on("data", (chunk: Buffer) => {
      buffer += chunk.toString();
      const match = buffer.match(/serving on (http:\/\/[^/ ]+)\//);
      if (match) {
        clearTimeout(timer);
        resolvePort(match[1]);
      }
    });
    server!.on("exit", (code) =>
      reject(new Error(`server exited early (${code}): ${buffer}`)));
  });
  client = new ApiClient(base);
}, 30000);

afterAll(() => {
  server?.kill();
  rmSync(work, { recursive: true, force: true });
});

describe("served observer model", () => {
  it("tree renders one composite with five leaves", async () => {
    const model = await client.model();
    const composites = model.root.children
      .filter((c): c is TreeComposite => c.kind === "composite");
    expect(composites).toHaveLength(1);
    expect(composites[0].name).toBe("FigureChanged");
    expect(composites[0].children).toHaveLength(5);
    expect(composites[0].children.every((c) => c.kind === "leaf")).toBe(true);
    const html = renderTree(model, new Set(["FigureChanged"]), null);
    expect(html.match(/data-open=/g)).toHaveLength(5);
  });

  it("CB notify leaf renders one row per tuple with resolving snippets",
     async () => {
    const doc = await client.instance("FigureChanged/CB notify");
    expect(doc.sort_kind).toBe("CB");
    expect(doc.result).toHaveLength(5);
    const html = renderInstance(doc);
    expect(html.match(/<tr data-row=/g)).toHaveLength(5);
    // every site link the table renders resolves to a real snippet
    for (const row of doc.result) {
      for (const [file, from, to] of row.sites) {
        const snippet = await client.source(file, from, to);
        expect(snippet.lines.length).toBeGreaterThan(0);
        expect(snippet.lines.join("\n")).toContain("changed");
      }
    }
  }, 20000);

  it("a no-op parameter refresh renders an empty diff", async () => {
    const diff = await client.refresh("FigureChanged/CB notify");
    expect(diff.added).toHaveLength(0);
    expect(diff.removed).toHaveLength(0);
    expect(renderDiff(diff)).toContain("no changes");
  });

  it("an edited context narrows the result and the diff shows it", async () => {
    const narrowed = await client.refresh("FigureChanged/CB notify", {
      context: "type (observer.RectangleFigure)",
    });
    expect(narrowed.removed.length).toBeGreaterThan(0);
    const widened = await client.refresh("FigureChanged/CB notify", {
      context: "observer.Figure+",
    });
    expect(widened.added.length).toBe(narrowed.removed.length);
  });

  it("touching lookup finds the notify leaf", async () => {
    const doc = await client.touching(
      "method:observer.AbstractFigure.changed#changed()");
    expect(doc.leaves.map((l) => l.id)).toContain("FigureChanged/CB notify");
  });
});
