/**
 * Session engine for single-stimulus subjective grading.
 *
 * Each stimulus is played exactly once, followed by a fixed-length voting
 * interval with a 0-100 slider.  The presentation order is a
 * seed-determined permutation per observer.  Playback and timing are
 * injected so the engine runs identically in the browser and in tests.
 */

export interface PlaylistEntry {
  conditionId: string;
  mediaPath: string;
  /** Nominal stimulus length, used for the session-cap projection. */
  durationSec: number;
}

export interface SessionConfig {
  playlist: PlaylistEntry[];
  voteIntervalSec: number;
  sessionCapMin: number;
  randomize: boolean;
  seed: number;
}

export interface ScoreEntry {
  conditionId: string;
  /** Continuous grade in [0, 100]. */
  score: number;
  timestampMs: number;
  /** True when the subject never moved the slider off its initial position. */
  untouched: boolean;
}

export interface SessionRecord {
  observerId: string;
  entries: ScoreEntry[];
}

/** Plays one stimulus; resolves when playback ends, rejects on load failure. */
export interface StimulusPlayer {
  play(entry: PlaylistEntry): Promise<void>;
}

/** The voting screen: a slider the engine samples when the interval ends. */
export interface VotingView {
  show(): void;
  readScore(): number;
  wasTouched(): boolean;
  hide(): void;
}

export interface Scheduler {
  setTimeout(fn: () => void, ms: number): void;
  now(): number;
}

export const SLIDER_INITIAL = 50;
export const DEFAULT_VOTE_INTERVAL_SEC = 10;
export const DEFAULT_SESSION_CAP_MIN = 30;

export class SessionAborted extends Error {}
export class ConfigError extends Error {}

/** Deterministic 32-bit PRNG (mulberry32). */
export function seededRandom(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function validateConfig(config: SessionConfig): void {
  if (config.playlist.length === 0) {
    throw new ConfigError("playlist must not be empty");
  }
  if (config.voteIntervalSec <= 0) {
    throw new ConfigError("vote interval must be positive");
  }
  if (config.sessionCapMin <= 0) {
    throw new ConfigError("session cap must be positive");
  }
  const ids = new Set<string>();
  for (const entry of config.playlist) {
    if (ids.has(entry.conditionId)) {
      throw new ConfigError(`duplicate condition id ${entry.conditionId}`);
    }
    ids.add(entry.conditionId);
    if (entry.durationSec < 0) {
      throw new ConfigError(`negative duration for ${entry.conditionId}`);
    }
  }
  const projected = projectedDurationSec(config);
  if (projected > config.sessionCapMin * 60) {
    throw new ConfigError(
      `projected session length ${Math.round(projected)} s exceeds the ` +
      `${config.sessionCapMin} min cap`);
  }
}

export function projectedDurationSec(config: SessionConfig): number {
  const media = config.playlist.reduce((acc, e) => acc + e.durationSec, 0);
  return media + config.playlist.length * config.voteIntervalSec;
}

/** Seed-determined presentation order (Fisher-Yates when randomizing). */
export function presentationOrder(config: SessionConfig): PlaylistEntry[] {
  const order = config.playlist.slice();
  if (!config.randomize) {
    return order;
  }
  const rand = seededRandom(config.seed);
  for (let i = order.length - 1; i > 0; i--) {
    const j = Math.floor(rand() * (i + 1));
    [order[i], order[j]] = [order[j], order[i]];
  }
  return order;
}

/** Parse the session config document (JSON), filling defaults. */
export function parseSessionConfig(text: string): SessionConfig {
  let data: Record<string, unknown>;
  try {
    data = JSON.parse(text);
  } catch {
    throw new ConfigError("session config is not valid JSON");
  }
  const playlist = data["playlist"];
  if (!Array.isArray(playlist)) {
    throw new ConfigError("session config needs a playlist array");
  }
  const config: SessionConfig = {
    playlist: playlist.map((raw: Record<string, unknown>, i: number) => {
      if (typeof raw["condition_id"] !== "string" || typeof raw["media"] !== "string") {
        throw new ConfigError(`playlist entry ${i} needs condition_id and media`);
      }
      return {
        conditionId: raw["condition_id"],
        mediaPath: raw["media"],
        durationSec: typeof raw["duration_sec"] === "number" ? raw["duration_sec"] : 0,
      };
    }),
    voteIntervalSec: typeof data["vote_interval_sec"] === "number"
      ? (data["vote_interval_sec"] as number) : DEFAULT_VOTE_INTERVAL_SEC,
    sessionCapMin: typeof data["session_cap_min"] === "number"
      ? (data["session_cap_min"] as number) : DEFAULT_SESSION_CAP_MIN,
    randomize: typeof data["randomize"] === "boolean" ? (data["randomize"] as boolean) : true,
    seed: typeof data["seed"] === "number" ? (data["seed"] as number) : 0,
  };
  validateConfig(config);
  return config;
}

/**
 * Run one grading session.  The voting screen cannot be dismissed early:
 * the only way forward is the vote-interval timer.  A media failure
 * aborts the session and discards the partial record.
 */
export async function runSession(
  config: SessionConfig,
  observerId: string,
  player: StimulusPlayer,
  voting: VotingView,
  scheduler: Scheduler,
): Promise<SessionRecord> {
  validateConfig(config);
  const entries: ScoreEntry[] = [];
  for (const entry of presentationOrder(config)) {
    try {
      await player.play(entry);
    } catch (err) {
      throw new SessionAborted(`media failed for ${entry.conditionId}: ${err}`);
    }
    voting.show();
    await new Promise<void>((resolve) =>
      scheduler.setTimeout(resolve, config.voteIntervalSec * 1000));
    const score = voting.readScore();
    if (!(score >= 0 && score <= 100)) {
      throw new SessionAborted(`slider reported out-of-range score ${score}`);
    }
    entries.push({
      conditionId: entry.conditionId,
      score,
      timestampMs: scheduler.now(),
      untouched: !voting.wasTouched(),
    });
    voting.hide();
  }
  return { observerId, entries };
}
