import { GatewayClient } from "./api.js";
import { App } from "./app.js";

const gatewayOrigin =
  document.querySelector("meta[name=gateway-origin]")?.getAttribute("content") ?? "";
const mount = document.getElementById("app");
if (!mount) {
  throw new Error("missing #app mount point");
}
new App(new GatewayClient(gatewayOrigin), mount).start();
