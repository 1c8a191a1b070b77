import { normalizeAnswer } from "./normalize.js";

const toHex = (digest: ArrayBuffer): string => {
  const view = new Uint8Array(digest);
  let out = "";
  for (let i = 0; i < view.length; i += 1) {
    out += view[i]!.toString(16).padStart(2, "0");
  }
  return out;
};

export const digestAvailable = (): boolean =>
  typeof globalThis.crypto !== "undefined" && !!globalThis.crypto.subtle;

export const sha256Hex = async (text: string): Promise<string> => {
  const bytes = new TextEncoder().encode(text);
  const digest = await globalThis.crypto.subtle.digest("SHA-256", bytes);
  return toHex(digest);
};

// The exact pipeline the server runs before comparing against the
// committed answer hash.
export const hashAnswer = (raw: string): Promise<string> =>
  sha256Hex(normalizeAnswer(raw));
