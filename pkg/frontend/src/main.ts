// Userscript entry point: inject on the issue-creation page.
import { DEFAULT_CONFIG, injectButton } from "./userscript";

injectButton(document, DEFAULT_CONFIG);
