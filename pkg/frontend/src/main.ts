import "./style.css";
import { ApiClient } from "./api";
import { AppController } from "./controller";
import type { DatasetInfo, Viewport } from "./types";

const FLUSH_EVERY_MS = 500;
const TICK_EVERY_MS = 1000;
const VIEW_W = 960;
const VIEW_H = 640;

function fitViewport(info: DatasetInfo): Viewport {
  const { min_lat, min_lon, max_lat, max_lon } = info.bbox;
  const gamma = (min_lat + max_lat) / 2;
  const theta = (min_lon + max_lon) / 2;
  const cos = Math.cos((gamma * Math.PI) / 180);
  const extent = Math.max(max_lat - min_lat, (max_lon - min_lon) * cos);
  return { gamma, theta, scale: extent > 0 ? extent / (VIEW_W * 0.9) : 1e-4 };
}

async function boot() {
  const app = document.querySelector<HTMLDivElement>("#app")!;
  app.innerHTML = `
    <header>
      <h1>geohighlight</h1>
      <span id="status">connecting...</span>
      <button id="run-now" type="button">Highlight now</button>
      <button id="zoom-in" type="button">+</button>
      <button id="zoom-out" type="button">&minus;</button>
    </header>
    <div id="map"></div>
  `;
  const status = document.querySelector<HTMLSpanElement>("#status")!;
  const api = new ApiClient("/api");

  const datasets = await api.listDatasets();
  if (!datasets.length) {
    status.textContent = "no datasets registered on the server";
    return;
  }
  const dataset = datasets[0];
  const viewport = fitViewport(dataset);
  let zoom = Math.round(Math.log2((360 / 256) * Math.cos((viewport.gamma * Math.PI) / 180) / viewport.scale));

  const controller = new AppController({
    api,
    container: document.querySelector<HTMLDivElement>("#map")!,
    datasetId: dataset.dataset_id,
    viewport,
    width: VIEW_W,
    height: VIEW_H,
  });
  await controller.start();
  status.textContent = `${dataset.dataset_id}: ${dataset.n_points} points`;

  document.querySelector("#run-now")!.addEventListener("click", () => {
    void controller.runNow();
  });
  document.querySelector("#zoom-in")!.addEventListener("click", () => {
    zoom += 1;
    void controller.setView(viewport.gamma, viewport.theta, zoom);
  });
  document.querySelector("#zoom-out")!.addEventListener("click", () => {
    zoom -= 1;
    void controller.setView(viewport.gamma, viewport.theta, zoom);
  });

  setInterval(() => void controller.flush(), FLUSH_EVERY_MS);
  setInterval(() => void controller.tick(), TICK_EVERY_MS);
}

boot().catch((err) => {
  const status = document.querySelector<HTMLSpanElement>("#status");
  if (status) status.textContent = `failed to start: ${err}`;
  console.error(err);
});
