import { ApiClient } from "./api.js";
import { App, formatHash, parseHash } from "./app.js";

const root = document.getElementById("app");
if (root === null) {
  throw new Error("missing #app mount point");
}
const app = new App(root, new ApiClient(""), (route) => {
  window.location.hash = formatHash(route);
});
void app.init(parseHash(window.location.hash)).catch((err) => {
  root.textContent = `failed to reach the simulation service: ${err}`;
});
