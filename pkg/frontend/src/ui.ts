/**
 * DOM layer: a centered stimulus stage with no playback controls, and a
 * voting screen with a continuous 0-100 slider annotated with the five
 * quality bands.  Implements the engine's player and voting interfaces.
 */

import {
  PlaylistEntry,
  SLIDER_INITIAL,
  StimulusPlayer,
  VotingView,
} from "./session.js";

const QUALITY_BANDS = ["Bad", "Poor", "Fair", "Good", "Excellent"];

export interface GradingScreen {
  root: HTMLElement;
  player: StimulusPlayer;
  voting: VotingView;
}

export function buildGradingScreen(doc: Document): GradingScreen {
  const root = doc.createElement("div");
  root.className = "grading-screen";

  const stage = doc.createElement("div");
  stage.className = "stimulus-stage";
  stage.style.display = "flex";
  stage.style.justifyContent = "center";
  stage.style.alignItems = "center";

  const video = doc.createElement("video");
  // deliberately no `controls`: subjects cannot replay, pause, or seek
  video.removeAttribute("controls");
  video.muted = false;
  video.setAttribute("aria-label", "stimulus playback");
  stage.appendChild(video);

  const votingPanel = doc.createElement("div");
  votingPanel.className = "voting-panel";
  votingPanel.hidden = true;

  const prompt = doc.createElement("p");
  prompt.textContent = "Rate the visual quality of the clip you just watched";
  votingPanel.appendChild(prompt);

  const slider = doc.createElement("input");
  slider.type = "range";
  slider.min = "0";
  slider.max = "100";
  slider.step = "any";
  slider.value = String(SLIDER_INITIAL);
  slider.setAttribute("aria-label", "quality score");
  votingPanel.appendChild(slider);

  const bands = doc.createElement("div");
  bands.className = "quality-bands";
  for (const label of QUALITY_BANDS) {
    const span = doc.createElement("span");
    span.textContent = label;
    bands.appendChild(span);
  }
  votingPanel.appendChild(bands);

  root.appendChild(stage);
  root.appendChild(votingPanel);

  let touched = false;
  slider.addEventListener("input", () => {
    touched = true;
  });

  const player: StimulusPlayer = {
    play(entry: PlaylistEntry): Promise<void> {
      return new Promise((resolve, reject) => {
        const onEnded = () => {
          cleanup();
          resolve();
        };
        const onError = () => {
          cleanup();
          reject(new Error(`cannot load ${entry.mediaPath}`));
        };
        const cleanup = () => {
          video.removeEventListener("ended", onEnded);
          video.removeEventListener("error", onError);
        };
        video.addEventListener("ended", onEnded);
        video.addEventListener("error", onError);
        video.src = entry.mediaPath;
        void video.play();
      });
    },
  };

  const voting: VotingView = {
    show() {
      slider.value = String(SLIDER_INITIAL);
      touched = false;
      votingPanel.hidden = false;
      stage.hidden = true;
    },
    readScore() {
      return Number(slider.value);
    },
    wasTouched() {
      return touched;
    },
    hide() {
      votingPanel.hidden = true;
      stage.hidden = false;
    },
  };

  return { root, player, voting };
}
