// Documents returned by the serve API. The client renders exactly what the
// API returns; it never evaluates queries itself.

export interface TreeLeaf {
  id: string;
  name: string;
  kind: "leaf";
  sort_kind: string;
  tuples: number;
  query_text: string;
  stale: boolean;
  broken: string | null;
}

export interface TreeComposite {
  id: string;
  name: string;
  kind: "composite";
  children: TreeNode[];
}

export type TreeNode = TreeLeaf | TreeComposite;

export interface ModelDoc {
  schema: string;
  name: string;
  store_hash: string;
  current_store_hash: string;
  virtual_interfaces: { role_name: string; host: string[]; members: string[] }[];
  root: TreeComposite;
}

export interface EntityRef {
  id: string;
  kind: string;
  qname: string;
  sig: string;
  in_store: boolean;
  loc?: { file: string; start: number; end: number };
}

export type Site = [string, number, number];

export interface TupleRow {
  src: EntityRef;
  tgt: EntityRef;
  kind: string;
  sites: Site[];
}

export interface InstanceDoc {
  id: string;
  name: string;
  sort_kind: string;
  params: [string, string][];
  query_text: string;
  store_hash: string;
  stale: boolean;
  broken: string | null;
  result: TupleRow[];
  obligations: EntityRef[];
  notes: string[];
}

export interface SourceDoc {
  file: string;
  from: number;
  to: number;
  lines: string[];
}

export interface TouchingDoc {
  entity: string;
  leaves: { id: string; name: string }[];
}

export interface RefreshDoc {
  id: string;
  added: TupleRow[];
  removed: TupleRow[];
  error: string | null;
}
