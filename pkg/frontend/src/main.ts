// Entry point for the static page. The API base defaults to the page origin;
// ?api=http://host:port points the client elsewhere (e.g. a dev service).

import { ApiClient } from "./api.js";
import { App } from "./app.js";

const base = new URLSearchParams(window.location.search).get("api") ?? "";
const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");
new App(root, new ApiClient(base));
