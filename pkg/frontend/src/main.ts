/** Browser entry point. Base URL: ?api=… query param, else same origin. */

import { SessionApi } from "./api.js";
import { App } from "./app.js";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("api") ?? "";
const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");
new App(root, new SessionApi(baseUrl));
