// Service base URL resolution: ?service= query parameter wins, then the
// value saved in localStorage, then the build-time default.

export const DEFAULT_SERVICE_URL = "http://127.0.0.1:8080";

const STORAGE_KEY = "agriqa.console.serviceUrl";

export function resolveServiceUrl(
  search: string,
  storage: Pick<Storage, "getItem" | "setItem"> | null,
): string {
  const fromQuery = new URLSearchParams(search).get("service");
  if (fromQuery) {
    storage?.setItem(STORAGE_KEY, fromQuery);
    return fromQuery;
  }
  const saved = storage?.getItem(STORAGE_KEY);
  return saved || DEFAULT_SERVICE_URL;
}
