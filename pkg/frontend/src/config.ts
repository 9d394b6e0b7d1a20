/** Service base URL, configurable via environment.
 *
 * Bundlers inject `import.meta.env.VITE_MVSEARCH_URL`; under node (tests,
 * ts-node tools) `MVSEARCH_URL` works. Falls back to the local dev server.
 */

const DEFAULT_URL = "http://127.0.0.1:8000";

declare const process: { env?: Record<string, string | undefined> } | undefined;

export function baseUrl(): string {
  const meta = import.meta as { env?: Record<string, string | undefined> };
  const fromMeta = meta.env?.VITE_MVSEARCH_URL;
  if (fromMeta) return stripSlash(fromMeta);
  if (typeof process !== "undefined") {
    const fromEnv = process?.env?.MVSEARCH_URL;
    if (fromEnv) return stripSlash(fromEnv);
  }
  return DEFAULT_URL;
}

function stripSlash(url: string): string {
  return url.endsWith("/") ? url.slice(0, -1) : url;
}
