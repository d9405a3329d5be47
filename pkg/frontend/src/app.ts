/** Browser bootstrap: same-origin API, mount on #app. */

import { Api } from "./api.js";
import { App } from "./router.js";

const root = document.getElementById("app");
if (root) {
  const app = new App(new Api(""), root);
  void app.render();
}
