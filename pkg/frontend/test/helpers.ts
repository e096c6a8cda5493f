/* Fixture-backed fetch router: the UI test suite runs entirely from
 * recorded API responses, with no engine running.
 */

import type { FetchJson } from "../src/api.js";
import { ApiError } from "../src/api.js";

import health from "../fixtures/health.json";
import statsFestival from "../fixtures/stats_festival.json";
import statsMoonshot from "../fixtures/stats_moonshot.json";
import statsAbsent from "../fixtures/stats_absent.json";
import summary1 from "../fixtures/summary_festival_1.json";
import summary2 from "../fixtures/summary_festival_2.json";
import definition1 from "../fixtures/definition_festival_1.json";
import definition2 from "../fixtures/definition_festival_2.json";
import alternatives from "../fixtures/alternatives_festival.json";
import scatterEconomy from "../fixtures/scatter_economy.json";
import samplesFestival1 from "../fixtures/samples_festival_1.json";
import samplesFestival2 from "../fixtures/samples_festival_2.json";
import samplesEconomy1 from "../fixtures/samples_economy_1.json";
import samplesEconomy2 from "../fixtures/samples_economy_2.json";
import curated from "../fixtures/curated.json";

export const FIXTURES = {
  health,
  statsFestival,
  statsMoonshot,
  statsAbsent,
  summary1,
  summary2,
  definition1,
  definition2,
  alternatives,
  scatterEconomy,
  samplesFestival1,
  samplesFestival2,
  samplesEconomy1,
  samplesEconomy2,
  curated,
};

export interface RouterOptions {
  /** map of "path" or "path?community=N" to an override responder */
  overrides?: Record<string, () => Promise<unknown>>;
  log?: { path: string; params?: Record<string, string> }[];
}

export function fixtureRouter(options: RouterOptions = {}): FetchJson {
  const { overrides = {}, log } = options;
  return async (path, params) => {
    log?.push({ path, params });
    const slotKey = params?.community ? `${path}?community=${params.community}` : path;
    const override = overrides[slotKey] ?? overrides[path];
    if (override) {
      return override();
    }
    const term = params?.term ?? "";
    switch (path) {
      case "/api/health":
        return health;
      case "/api/curated":
        return curated;
      case "/api/stats":
        if (term === "festival") return statsFestival;
        if (term === "moonshot") return statsMoonshot;
        return statsAbsent;
      case "/api/summary":
        return params?.community === "1" ? summary1 : summary2;
      case "/api/definition":
        return params?.community === "1" ? definition1 : definition2;
      case "/api/alternatives":
        return alternatives;
      case "/api/scatter":
        return scatterEconomy;
      case "/api/samples":
        if (term === "economy") {
          return params?.community === "1" ? samplesEconomy1 : samplesEconomy2;
        }
        return params?.community === "1" ? samplesFestival1 : samplesFestival2;
      default:
        throw new ApiError(404, "not found", "not_found");
    }
  };
}

export function serverError(): Promise<never> {
  return Promise.reject(new ApiError(500, "internal error: induced", "internal"));
}
