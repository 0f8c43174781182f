/** Browser wiring: mounts the correction loop onto #app. */

import { ApiClient } from "./api.js";
import { SessionController } from "./session.js";
import {
  h,
  renderControls,
  renderCounters,
  renderHypothesis,
  renderStatus,
  toDom,
} from "./render.js";

function start(): void {
  const root = document.getElementById("app");
  if (!root) return;
  const api = new ApiClient("");
  const controller = new SessionController(api);

  let samples: string[] = [];
  const picker = document.createElement("select");
  picker.className = "sample-picker";
  const textInput = document.createElement("input");
  textInput.type = "text";
  textInput.placeholder = "or type a source text";
  textInput.className = "text-input";

  const refreshSamples = async () => {
    try {
      samples = (await api.listSamples()).samples;
    } catch {
      samples = [];
    }
    picker.replaceChildren(
      ...samples.map((id) => {
        const option = document.createElement("option");
        option.value = id;
        option.textContent = `sample ${id}`;
        return option;
      }),
    );
  };

  const create = () => {
    const text = textInput.value.trim();
    if (text) {
      void controller.create({ text });
    } else if (picker.value) {
      void controller.create({ sample_id: picker.value });
    }
  };

  const stage = document.createElement("div");
  const render = () => {
    const view = controller.view;
    const tree = h("div", { class: "session" }, [
      renderStatus(view),
      renderHypothesis(view, controller),
      renderCounters(view),
      renderControls(view, {
        create,
        accept: () => void controller.accept(),
        reset: () => void controller.reset(),
      }),
    ]);
    stage.replaceChildren(toDom(tree, document));
  };

  controller.onChange(render);
  document.addEventListener("keydown", (event) => {
    if (event.target === textInput) return;
    if (event.key.length === 1 && !event.ctrlKey && !event.metaKey && !event.altKey) {
      controller.typeCharacter(event.key);
      event.preventDefault();
    }
  });

  const header = document.createElement("div");
  header.className = "setup";
  header.append(picker, textInput);
  root.append(header, stage);
  void refreshSamples().then(render);
}

start();
