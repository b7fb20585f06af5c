import { createApp } from "./app.js";
import { createClient, createFixtureClient } from "./api.js";

const params = new URLSearchParams(window.location.search);
const client = params.has("mock")
  ? createFixtureClient()
  : createClient(params.get("api") ?? "");

createApp(document.getElementById("app")!, client);
