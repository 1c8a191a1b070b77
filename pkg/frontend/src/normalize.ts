// Mirror of the server's answer normalization: trim, collapse internal
// whitespace runs to single spaces, lowercase. The server folds case with
// Python's casefold; toLowerCase matches it for ASCII and ordinary Latin
// text (the whole answer domain). Exotic case folds (German sharp s,
// dotted I) could diverge, but the live hash display is advisory and the
// server's verdict is authoritative.
export const normalizeAnswer = (raw: string): string =>
  raw.toLowerCase().split(/\s+/u).filter(Boolean).join(" ");
