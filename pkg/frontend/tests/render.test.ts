import { describe, expect, it } from "vitest";

import {
  renderDiff, renderInstance, renderSnippet, renderTouching, renderTree,
} from "../src/render.js";
import type {
  InstanceDoc, ModelDoc, RefreshDoc, TreeComposite, TupleRow,
} from "../src/types.js";

function entity(qname: string, sig = ""): TupleRow["src"] {
  return { id: `x:${qname}`, kind: "Method", qname, sig, in_store: true };
}

function row(src: string, tgt: string): TupleRow {
  return {
    src: entity(src, "m()"),
    tgt: entity(tgt, "n()"),
    kind: "Invokes",
    sites: [["observer.oosl", 12, 12]],
  };
}

function modelDoc(children: TreeComposite["children"]): ModelDoc {
  return {
    schema: "soquet-model/1",
    name: "M",
    store_hash: "h1",
    current_store_hash: "h1",
    virtual_interfaces: [],
    root: { id: "", name: "M", kind: "composite", children },
  };
}

describe("renderTree", () => {
  it("renders an empty-state message for a model without concerns", () => {
    const html = renderTree(modelDoc([]), new Set(), null);
    expect(html).toContain("no concerns yet");
  });

  it("renders composites with expandable children and leaf labels", () => {
    const doc = modelDoc([{
      id: "G", name: "G", kind: "composite",
      children: [{
        id: "G/leaf", name: "leaf", kind: "leaf", sort_kind: "CB",
        tuples: 2, query_text: "invokes(a, b);", stale: false, broken: null,
      }],
    }]);
    const closed = renderTree(doc, new Set(), null);
    expect(closed).toContain("▸ G");
    expect(closed).not.toContain("leaf-name");
    const open = renderTree(doc, new Set(["G"]), null);
    expect(open).toContain("▾ G");
    expect(open).toContain("leaf");
    expect(open).toContain("(CB, 2 tuples)");
    expect(open).toContain("invokes(a, b);"); // query description on the node
  });

  it("shows a staleness badge", () => {
    const doc = modelDoc([{
      id: "G", name: "G", kind: "composite",
      children: [{
        id: "G/l", name: "l", kind: "leaf", sort_kind: "RL",
        tuples: 0, query_text: "q;", stale: true, broken: null,
      }],
    }]);
    const html = renderTree(doc, new Set(["G"]), null);
    expect(html).toContain('class="badge stale"');
  });

  it("warns when model and store hashes differ", () => {
    const doc = modelDoc([]);
    doc.current_store_hash = "h2";
    doc.root.children = [
      { id: "G", name: "G", kind: "composite", children: [] }];
    expect(renderTree(doc, new Set(), null)).toContain("stale");
  });
});

function instanceDoc(partial: Partial<InstanceDoc> = {}): InstanceDoc {
  return {
    id: "G/leaf",
    name: "leaf",
    sort_kind: "CB",
    params: [["context", "pkg.I+"], ["target", "changed()"]],
    query_text: "invokes(a, b);",
    store_hash: "h1",
    stale: false,
    broken: null,
    result: [],
    obligations: [],
    notes: [],
    ...partial,
  };
}

describe("renderInstance", () => {
  it("renders one table row per tuple with site links", () => {
    const doc = instanceDoc({
      result: [row("p.A.m", "p.B.n"), row("p.C.m", "p.B.n")],
    });
    const html = renderInstance(doc);
    expect(html.match(/<tr data-row=/g)).toHaveLength(2);
    expect(html).toContain('data-file="observer.oosl"');
    expect(html).toContain("observer.oosl:12");
  });

  it("documents absence for an empty result", () => {
    expect(renderInstance(instanceDoc())).toContain(
      "no tuples (documented absence)");
  });

  it("renders an error panel for a broken leaf", () => {
    const html = renderInstance(instanceDoc({
      broken: "role type gone from store",
    }));
    expect(html).toContain("error-panel");
    expect(html).toContain("role type gone from store");
    expect(html).not.toContain("<table");
  });

  it("shows parameter inputs and the verbatim query text", () => {
    const html = renderInstance(instanceDoc());
    expect(html).toContain('data-param="context"');
    expect(html).toContain('value="pkg.I+"');
    expect(html).toContain("invokes(a, b);");
  });

  it("lists the obligation set when present", () => {
    const html = renderInstance(instanceDoc({
      obligations: [entity("p.PolygonFigure")],
    }));
    expect(html).toContain("obligation set");
    expect(html).toContain("p.PolygonFigure");
  });
});

describe("renderDiff", () => {
  it("renders an empty diff as no changes", () => {
    const diff: RefreshDoc = { id: "x", added: [], removed: [], error: null };
    expect(renderDiff(diff)).toContain("no changes");
  });

  it("highlights added and removed tuples", () => {
    const diff: RefreshDoc = {
      id: "x",
      added: [row("p.New.m", "p.B.n")],
      removed: [row("p.Old.m", "p.B.n")],
      error: null,
    };
    const html = renderDiff(diff);
    expect(html).toContain("added");
    expect(html).toContain("p.New.m");
    expect(html).toContain("removed");
    expect(html).toContain("p.Old.m");
  });

  it("surfaces refresh errors", () => {
    const diff: RefreshDoc = {
      id: "x", added: [], removed: [], error: "pattern matches no method",
    };
    expect(renderDiff(diff)).toContain("pattern matches no method");
  });
});

describe("renderSnippet and renderTouching", () => {
  it("renders numbered source lines", () => {
    const html = renderSnippet({
      file: "observer.oosl", from: 3, to: 4,
      lines: ["class A {", "}"],
    });
    expect(html).toContain("observer.oosl:3-4");
    expect(html).toContain('<span class="lineno">3</span>');
    expect(html).toContain("class A {");
  });

  it("escapes markup in source lines", () => {
    const html = renderSnippet({
      file: "f.oosl", from: 1, to: 1, lines: ["if (a < b) {}"],
    });
    expect(html).toContain("a &lt; b");
  });

  it("lists touching leaves with open links", () => {
    const html = renderTouching({
      entity: "method:p.C.m#m()",
      leaves: [{ id: "G/notify", name: "notify" }],
    });
    expect(html).toContain('data-open="G/notify"');
    const empty = renderTouching({ entity: "x", leaves: [] });
    expect(empty).toContain("no concern leaves");
  });
});
