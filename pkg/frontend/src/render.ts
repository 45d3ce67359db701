// HTML renderers: pure functions from API documents to markup strings.
// Interactive elements carry data-* attributes that app.ts wires up.

import type {
  InstanceDoc, ModelDoc, RefreshDoc, SourceDoc, TouchingDoc, TreeNode,
  TupleRow,
} from "./types.js";

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function label(ref: { qname: string; sig: string }): string {
  return ref.sig ? `${ref.qname}#${ref.sig}` : ref.qname;
}

export function renderTree(doc: ModelDoc, expanded: Set<string>,
                           selected: string | null): string {
  if (!doc.root.children.length) {
    return `<p class="empty">This model has no concerns yet. Build sort ` +
      `instances with the CLI and reload.</p>`;
  }
  const header = doc.store_hash !== doc.current_store_hash
    ? `<p class="warn">Model was computed against a different fact store; ` +
      `results may be stale.</p>`
    : "";
  return header + `<ul class="tree">` +
    doc.root.children.map((c) => renderNode(c, expanded, selected)).join("") +
    `</ul>`;
}

function renderNode(node: TreeNode, expanded: Set<string>,
                    selected: string | null): string {
  if (node.kind === "composite") {
    const open = expanded.has(node.id);
    const children = open
      ? `<ul>` +
        node.children.map((c) => renderNode(c, expanded, selected)).join("") +
        `</ul>`
      : "";
    return `<li class="composite" data-path="${esc(node.id)}">` +
      `<span class="toggle" data-toggle="${esc(node.id)}">` +
      `${open ? "▾" : "▸"} ${esc(node.name)}</span>${children}</li>`;
  }
  const badges = [
    node.stale ? `<span class="badge stale">stale</span>` : "",
    node.broken ? `<span class="badge broken">broken</span>` : "",
  ].join("");
  const cls = node.id === selected ? "leaf selected" : "leaf";
  return `<li class="${cls}" data-leaf="${esc(node.id)}">` +
    `<span class="leaf-name" data-open="${esc(node.id)}">` +
    `${esc(node.name)} <em>(${esc(node.sort_kind)}, ${node.tuples} tuples)` +
    `</em></span>${badges}` +
    `<div class="leaf-query">${esc(node.query_text)}</div></li>`;
}

export function renderTupleRow(row: TupleRow, index: number): string {
  const sites = row.sites.map(([file, start, end]) =>
    `<a href="#" class="site" data-file="${esc(file)}" ` +
    `data-from="${start}" data-to="${end}">${esc(file)}:${start}</a>`,
  ).join(" ");
  return `<tr data-row="${index}">` +
    `<td>${esc(label(row.src))}</td>` +
    `<td>${esc(label(row.tgt))}</td>` +
    `<td>${esc(row.kind)}</td>` +
    `<td>${sites}</td></tr>`;
}

export function renderInstance(doc: InstanceDoc): string {
  if (doc.broken) {
    return `<div class="error-panel"><h3>${esc(doc.name)}</h3>` +
      `<p class="broken">Broken: ${esc(doc.broken)}</p></div>`;
  }
  const params = doc.params.map(([key, value]) =>
    `<label>${esc(key)} ` +
    `<input data-param="${esc(key)}" value="${esc(value)}">` +
    `<span class="param-error" data-param-error="${esc(key)}"></span>` +
    `</label>`,
  ).join("");
  const table = doc.result.length
    ? `<table class="tuples"><thead><tr><th>source</th><th>target</th>` +
      `<th>relation</th><th>sites</th></tr></thead><tbody>` +
      doc.result.map(renderTupleRow).join("") +
      `</tbody></table>`
    : `<p class="empty">no tuples (documented absence)</p>`;
  const obligations = doc.obligations.length
    ? `<h4>obligation set</h4><ul class="obligations">` +
      doc.obligations.map((o) => `<li>${esc(label(o))}</li>`).join("") +
      `</ul>`
    : "";
  const notes = doc.notes.length
    ? doc.notes.map((n) => `<p class="note">${esc(n)}</p>`).join("")
    : "";
  const stale = doc.stale
    ? `<p class="warn">computed against an older fact store</p>` : "";
  return `<div class="instance" data-instance="${esc(doc.id)}">` +
    `<h3>${esc(doc.name)} <em>[${esc(doc.sort_kind)}]</em></h3>` + stale +
    `<pre class="query">${esc(doc.query_text)}</pre>` +
    `<form class="params" data-refresh="${esc(doc.id)}">${params}` +
    `<button type="submit">re-run query</button></form>` +
    table + obligations + notes +
    `<div id="diff"></div><div id="snippet"></div></div>`;
}

export function renderDiff(doc: RefreshDoc): string {
  if (doc.error) {
    return `<div class="error-panel">refresh failed: ${esc(doc.error)}</div>`;
  }
  if (!doc.added.length && !doc.removed.length) {
    return `<p class="empty diff-empty">no changes</p>`;
  }
  const block = (title: string, rows: TupleRow[], cls: string) =>
    rows.length
      ? `<h4>${title}</h4><table class="tuples ${cls}"><tbody>` +
        rows.map(renderTupleRow).join("") + `</tbody></table>`
      : "";
  return `<div class="diff">` +
    block("added", doc.added, "added") +
    block("removed", doc.removed, "removed") +
    `</div>`;
}

export function renderSnippet(doc: SourceDoc): string {
  const rows = doc.lines.map((line, i) =>
    `<span class="lineno">${doc.from + i}</span>${esc(line)}`,
  ).join("\n");
  return `<h4>${esc(doc.file)}:${doc.from}-${doc.to}</h4>` +
    `<pre class="snippet">${rows}</pre>`;
}

export function renderTouching(doc: TouchingDoc): string {
  if (!doc.leaves.length) {
    return `<p class="empty">no concern leaves touch ` +
      `${esc(doc.entity)}</p>`;
  }
  return `<ul class="touching">` +
    doc.leaves.map((l) =>
      `<li><a href="#" data-open="${esc(l.id)}">${esc(l.name)}</a> ` +
      `<em>${esc(l.id)}</em></li>`,
    ).join("") + `</ul>`;
}

export function renderFetchError(context: string, message: string): string {
  return `<div class="error-panel">${esc(context)}: ${esc(message)}</div>`;
}
