/**
 * Minimal CSV reader for the idphase data files.
 *
 * The producer never quotes fields (plain numbers and bare words), so a
 * straight split is exact. Headers are validated against the documented
 * schema and mismatches are reported as a column diff.
 */

export class SchemaMismatchError extends Error {
  constructor(path: string, expected: readonly string[], found: readonly string[]) {
    const missing = expected.filter((c) => !found.includes(c));
    const extra = found.filter((c) => !expected.includes(c));
    super(
      `${path}: column schema mismatch` +
        (missing.length ? `; missing: ${missing.join(", ")}` : "") +
        (extra.length ? `; unexpected: ${extra.join(", ")}` : ""),
    );
    this.name = "SchemaMismatchError";
  }
}

export interface Table {
  columns: string[];
  rows: string[][];
}

export function parseCsv(text: string, path: string, expected: readonly string[]): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new Error(`${path}: empty file`);
  }
  const columns = lines[0].split(",");
  if (
    columns.length !== expected.length ||
    expected.some((c, i) => columns[i] !== c)
  ) {
    throw new SchemaMismatchError(path, expected, columns);
  }
  const rows = lines.slice(1).map((l, i) => {
    const cells = l.split(",");
    if (cells.length !== columns.length) {
      throw new Error(`${path}: row ${i + 2} has ${cells.length} cells, want ${columns.length}`);
    }
    return cells;
  });
  return { columns, rows };
}

export function column(table: Table, name: string): string[] {
  const idx = table.columns.indexOf(name);
  return table.rows.map((r) => r[idx]);
}

export function numericColumn(table: Table, name: string): number[] {
  return column(table, name).map((v, i) => {
    const x = Number(v);
    if (!Number.isFinite(x)) {
      throw new Error(`column ${name}, row ${i + 2}: not a finite number: ${v}`);
    }
    return x;
  });
}

export const PHASE_COLUMNS = [
  "model", "N", "L", "d", "K", "alpha_target", "alpha_achieved",
  "epsilon", "trials", "identifiable_count", "ambiguous_count", "base_seed",
] as const;

export const THEORY_COLUMNS = [
  "epsilon", "mu_star", "delta_star", "asymptote_2eps_log", "residual",
] as const;
