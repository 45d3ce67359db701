// DOM wiring: fetch documents, render panels, route clicks. All data comes
// from the serve API; rendering lives in render.ts and state in state.ts.

import { ApiClient } from "./api.js";
import {
  editParam, effectiveEdits, initialState, isCurrentRefresh, nextRefreshSeq,
  selectLeaf, toggleExpanded, validateEdits, ViewState,
} from "./state.js";
import {
  renderDiff, renderFetchError, renderInstance, renderSnippet, renderTouching,
  renderTree,
} from "./render.js";
import type { InstanceDoc, ModelDoc } from "./types.js";

const api = new ApiClient("");
let state: ViewState = initialState();
let model: ModelDoc | null = null;
let instance: InstanceDoc | null = null;

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function drawTree(): void {
  if (model) {
    el("tree").innerHTML = renderTree(model, state.expanded, state.selected);
  }
}

async function openInstance(id: string): Promise<void> {
  state = selectLeaf(state, id);
  drawTree();
  try {
    instance = await api.instance(id);
    el("instance").innerHTML = renderInstance(instance);
  } catch (err) {
    el("instance").innerHTML =
      renderFetchError("loading instance", String(err));
  }
}

async function openSnippet(file: string, from: number, to: number):
    Promise<void> {
  const target = document.getElementById("snippet");
  if (!target) return;
  try {
    const doc = await api.source(file, from, to);
    target.innerHTML = renderSnippet(doc);
  } catch (err) {
    target.innerHTML = renderFetchError("loading source", String(err));
  }
}

async function submitRefresh(form: HTMLFormElement): Promise<void> {
  if (!instance) return;
  const problems = validateEdits(state.pendingEdits);
  for (const errSpan of form.querySelectorAll<HTMLElement>(".param-error")) {
    const key = errSpan.dataset.paramError ?? "";
    errSpan.textContent = problems[key] ?? "";
  }
  if (Object.keys(problems).length) {
    return; // invalid edits never reach the server
  }
  const edits = effectiveEdits(instance.params, state.pendingEdits);
  const [next, seq] = nextRefreshSeq(state);
  state = next;
  try {
    const diff = await api.refresh(instance.id, edits);
    if (!isCurrentRefresh(state, seq)) {
      return; // a newer refresh is in flight; drop this response
    }
    const target = document.getElementById("diff");
    if (target) target.innerHTML = renderDiff(diff);
  } catch (err) {
    const target = document.getElementById("diff");
    if (target) target.innerHTML = renderFetchError("refresh", String(err));
  }
}

async function lookupTouching(entity: string): Promise<void> {
  try {
    const doc = await api.touching(entity);
    el("touching-results").innerHTML = renderTouching(doc);
  } catch (err) {
    el("touching-results").innerHTML =
      renderFetchError("touching lookup", String(err));
  }
}

function wire(): void {
  el("tree").addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const toggle = target.closest<HTMLElement>("[data-toggle]");
    if (toggle) {
      state = toggleExpanded(state, toggle.dataset.toggle!);
      drawTree();
      return;
    }
    const open = target.closest<HTMLElement>("[data-open]");
    if (open) {
      void openInstance(open.dataset.open!);
    }
  });

  el("instance").addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const site = target.closest<HTMLElement>(".site");
    if (site) {
      event.preventDefault();
      void openSnippet(site.dataset.file!, Number(site.dataset.from),
                       Number(site.dataset.to));
    }
  });

  el("instance").addEventListener("input", (event) => {
    const input = event.target as HTMLInputElement;
    if (input.dataset.param) {
      state = editParam(state, input.dataset.param, input.value);
    }
  });

  el("instance").addEventListener("submit", (event) => {
    const form = event.target as HTMLFormElement;
    if (form.dataset.refresh !== undefined) {
      event.preventDefault();
      void submitRefresh(form);
    }
  });

  el("touching-form").addEventListener("submit", (event) => {
    event.preventDefault();
    const input = el("touching-entity") as HTMLInputElement;
    if (input.value.trim()) {
      void lookupTouching(input.value.trim());
    }
  });
}

async function start(): Promise<void> {
  wire();
  try {
    model = await api.model();
    // open every composite initially so the shape is visible at a glance
    const expand = (node: { kind: string; id: string; children?: unknown[] }) => {
      if (node.kind === "composite") {
        state.expanded.add(node.id);
        for (const child of (node.children ?? []) as typeof node[]) {
          expand(child);
        }
      }
    };
    for (const child of model.root.children) expand(child);
    drawTree();
  } catch (err) {
    el("tree").innerHTML = renderFetchError("loading model", String(err));
  }
}

document.addEventListener("DOMContentLoaded", () => {
  void start();
});
