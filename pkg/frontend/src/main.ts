/** Browser entry point: load a session config, grade, download the scores. */

import { downloadScores } from "./export.js";
import { parseSessionConfig, runSession, SessionRecord } from "./session.js";
import { buildGradingScreen } from "./ui.js";

export function bootstrap(doc: Document): void {
  const app = doc.getElementById("app");
  if (!app) {
    throw new Error("missing #app container");
  }

  const observerInput = doc.createElement("input");
  observerInput.type = "text";
  observerInput.placeholder = "observer id";
  observerInput.setAttribute("aria-label", "observer id");

  const configInput = doc.createElement("input");
  configInput.type = "file";
  configInput.accept = "application/json";
  configInput.setAttribute("aria-label", "session config");

  const startButton = doc.createElement("button");
  startButton.textContent = "Start session";

  const status = doc.createElement("p");
  status.setAttribute("role", "status");

  const screen = buildGradingScreen(doc);
  app.append(observerInput, configInput, startButton, status, screen.root);

  startButton.addEventListener("click", async () => {
    const file = configInput.files?.[0];
    const observerId = observerInput.value.trim();
    if (!file || !observerId) {
      status.textContent = "Pick a config file and enter an observer id first.";
      return;
    }
    startButton.disabled = true;
    try {
      const config = parseSessionConfig(await file.text());
      const record: SessionRecord = await runSession(
        config, observerId, screen.player, screen.voting,
        { setTimeout: (fn, ms) => window.setTimeout(fn, ms), now: () => Date.now() });
      downloadScores(doc, [record], `${observerId}_scores.csv`);
      status.textContent = `Session complete: ${record.entries.length} conditions graded.`;
    } catch (err) {
      status.textContent = `Session aborted: ${err}`;
    } finally {
      startButton.disabled = false;
    }
  });
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  bootstrap(document);
}
