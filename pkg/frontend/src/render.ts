// SVG renderer. Everything displayed traces back to a server view field;
// the only client-side state is the pending-request flag and the move log.

import { BoardViewModel, EdgeVisual } from "./viewmodel.js";

const SVG_NS = "http://www.w3.org/2000/svg";

const EDGE_CLASS: Record<EdgeVisual["state"], string> = {
  free: "edge-free",
  mine: "edge-mine",
  machine: "edge-machine",
  threat: "edge-threat",
  witness: "edge-witness",
};

export interface RenderCallbacks {
  onEdgeClick: (edgeId: number) => void;
}

export function renderBoard(
  container: HTMLElement,
  model: BoardViewModel,
  callbacks: RenderCallbacks,
  doc: Document = document,
): void {
  container.innerHTML = "";

  const svg = doc.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", "0 0 640 640");
  svg.setAttribute("class", "board");

  for (const e of model.edges) {
    const line = doc.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(e.x1));
    line.setAttribute("y1", String(e.y1));
    line.setAttribute("x2", String(e.x2));
    line.setAttribute("y2", String(e.y2));
    line.setAttribute("class", EDGE_CLASS[e.state]);
    line.setAttribute("data-edge-id", String(e.id));
    if (e.clickable) {
      line.setAttribute("data-clickable", "1");
      line.addEventListener("click", () => callbacks.onEdgeClick(e.id));
    }
    svg.appendChild(line);
  }
  model.vertices.forEach((v, i) => {
    const circle = doc.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", String(v.x));
    circle.setAttribute("cy", String(v.y));
    circle.setAttribute("r", "6");
    circle.setAttribute("class", "vertex");
    circle.setAttribute("data-vertex-id", String(i));
    svg.appendChild(circle);
  });
  container.appendChild(svg);

  if (model.banner) {
    const banner = doc.createElement("div");
    banner.className = "banner";
    banner.textContent = model.banner;
    container.appendChild(banner);
  }

  const log = doc.createElement("ul");
  log.className = "move-log";
  for (const entry of model.moveLog.slice(-12)) {
    const li = doc.createElement("li");
    li.textContent = entry;
    log.appendChild(li);
  }
  container.appendChild(log);
}
