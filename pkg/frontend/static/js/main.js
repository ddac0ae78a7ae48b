/** Browser entry point: same-origin API, localStorage-backed queue. */
import { ApiClient } from "./api.js";
import { BrowserStorage } from "./queue.js";
import { createApp } from "./view.js";
const root = document.getElementById("app");
if (root === null)
    throw new Error("missing #app element");
const app = createApp(root, new ApiClient(""), {
    storage: new BrowserStorage("termlex-label-queue"),
});
// flush queued submissions as soon as connectivity returns
window.addEventListener("online", () => void app.flushQueue());
window.setInterval(() => void app.flushQueue(), 15000);
