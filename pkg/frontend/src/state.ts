// View state and parameter-edit validation. Edits are validated before any
// request is sent; stale refresh responses are dropped by sequence number.

export interface ViewState {
  selected: string | null;          // node path within the last-fetched model
  expanded: Set<string>;            // composite paths currently open
  activeInstance: string | null;    // leaf whose document is displayed
  snippet: { file: string; from: number; to: number } | null;
  pendingEdits: Record<string, string>;
  refreshSeq: number;               // sequence number of the last refresh sent
}

export function initialState(): ViewState {
  return {
    selected: null,
    expanded: new Set(),
    activeInstance: null,
    snippet: null,
    pendingEdits: {},
    refreshSeq: 0,
  };
}

export function toggleExpanded(state: ViewState, path: string): ViewState {
  const expanded = new Set(state.expanded);
  if (expanded.has(path)) {
    expanded.delete(path);
  } else {
    expanded.add(path);
  }
  return { ...state, expanded };
}

export function selectLeaf(state: ViewState, path: string): ViewState {
  return {
    ...state,
    selected: path,
    activeInstance: path,
    snippet: null,
    pendingEdits: {},
  };
}

export function editParam(state: ViewState, key: string,
                          value: string): ViewState {
  return { ...state, pendingEdits: { ...state.pendingEdits, [key]: value } };
}

export function nextRefreshSeq(state: ViewState): [ViewState, number] {
  const seq = state.refreshSeq + 1;
  return [{ ...state, refreshSeq: seq }, seq];
}

export function isCurrentRefresh(state: ViewState, seq: number): boolean {
  return state.refreshSeq === seq;
}

// Parameter values are patterns, context expressions or flags. Validation
// is purely syntactic (the server owns real parsing): non-empty, balanced
// parens, and no characters outside the query alphabet.
const PARAM_CHARS = /^[A-Za-z0-9_.$*+(),:#<>|&\s-]+$/;

export function validateParam(value: string): string | null {
  if (!value.trim()) {
    return "parameter must not be empty";
  }
  if (!PARAM_CHARS.test(value)) {
    return "parameter contains characters outside the query syntax";
  }
  let depth = 0;
  for (const ch of value) {
    if (ch === "(") depth += 1;
    if (ch === ")") depth -= 1;
    if (depth < 0) return "unbalanced parentheses";
  }
  if (depth !== 0) return "unbalanced parentheses";
  return null;
}

export function validateEdits(
  edits: Record<string, string>,
): Record<string, string> {
  const problems: Record<string, string> = {};
  for (const [key, value] of Object.entries(edits)) {
    const problem = validateParam(value);
    if (problem !== null) {
      problems[key] = problem;
    }
  }
  return problems;
}

// An edit set is a no-op when every pending value equals the current one.
export function effectiveEdits(
  current: [string, string][],
  edits: Record<string, string>,
): Record<string, string> | undefined {
  const base = Object.fromEntries(current);
  const changed: Record<string, string> = {};
  for (const [key, value] of Object.entries(edits)) {
    if (base[key] !== value) {
      changed[key] = value;
    }
  }
  return Object.keys(changed).length ? changed : undefined;
}
