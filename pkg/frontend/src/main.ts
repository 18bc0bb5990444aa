import { mountExplorer } from "./controls.js";

window.addEventListener("DOMContentLoaded", () => {
  mountExplorer("");
});
