/** Browser entry point. The API base URL is the one config value: it comes
 * from `?api=` in the page URL or defaults to same-origin. */

import { ApiClient } from "./api.js";
import { App } from "./app.js";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("api") ?? "";
const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app mount point");
}
new App(root, new ApiClient(baseUrl));
