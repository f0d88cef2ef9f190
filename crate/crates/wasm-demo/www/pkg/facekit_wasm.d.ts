/* tslint:disable */
/* eslint-disable */

export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Scans the scene with the trained cascade. Returns grouped
     * detections and the raw window count:
     * `{"raw":n,"detections":[{"x","y","w","h","neighbors"}]}`.
     */
    detect_scene(seed: bigint, w: number, h: number, face_size: number, scale_factor: number, min_neighbors: number): string;
    /**
     * Binary view at `threshold` (pass a negative value to use Otsu),
     * scaled to 0/255 for direct display.
     */
    face_binary_pixels(profile: number, seed: bigint, size: number, threshold: number): Uint8Array;
    /**
     * Gray and binary histograms of the whole face and its two halves:
     * `{"otsu":..,"threshold":..,"whole":[..256],"left":[..],"right":[..],
     *   "binary_whole":[2],"binary_left":[2],"binary_right":[2]}`.
     */
    face_histograms(profile: number, seed: bigint, size: number, threshold: number): string;
    /**
     * Otsu threshold of the rendered face.
     */
    face_otsu(profile: number, seed: bigint, size: number): number;
    /**
     * Renders one synthetic face (profile 0..=2, anything else generic)
     * as a flat grayscale buffer.
     */
    face_pixels(profile: number, seed: bigint, size: number): Uint8Array;
    /**
     * Pixels of a fresh identity scene, for drawing next to the
     * recognition verdict.
     */
    identity_scene_pixels(profile: number, seed: bigint): Uint8Array;
    constructor();
    /**
     * Recognizes a fresh scene of the given identity profile with the
     * enrolled model: `{"truth":..,"result":"label"|"unknown","confidence":..}`.
     */
    recognize_scene(profile: number, seed: bigint): string;
    /**
     * A scene with one planted face, as flat grayscale pixels.
     */
    scene_pixels(seed: bigint, w: number, h: number, face_size: number): Uint8Array;
    /**
     * Ground-truth rectangle of the planted face: `{"x":..,"y":..,"w":..,"h":..}`.
     */
    scene_truth(seed: bigint, w: number, h: number, face_size: number): string;
    /**
     * Trains a small cascade on the jittered synthetic corpus and keeps
     * it for scanning. Returns the per-stage training report.
     */
    train_detector(seed: bigint, max_stages: number, n_pos: number, n_neg: number): string;
    /**
     * Enrolls a synthetic three-identity corpus (using the trained
     * detector, or a freshly trained one) and evaluates held-out images.
     * Returns training curves and evaluation statistics.
     */
    train_recognizer(seed: bigint, per_identity: number, max_epochs: number, restarts: number): string;
}

/**
 * Crate version string for the page footer.
 */
export function version(): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly demo_detect_scene: (a: number, b: bigint, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly demo_face_binary_pixels: (a: number, b: number, c: bigint, d: number, e: number) => [number, number];
    readonly demo_face_histograms: (a: number, b: number, c: bigint, d: number, e: number) => [number, number, number, number];
    readonly demo_face_otsu: (a: number, b: number, c: bigint, d: number) => number;
    readonly demo_face_pixels: (a: number, b: number, c: bigint, d: number) => [number, number];
    readonly demo_identity_scene_pixels: (a: number, b: number, c: bigint) => [number, number];
    readonly demo_new: () => number;
    readonly demo_recognize_scene: (a: number, b: number, c: bigint) => [number, number, number, number];
    readonly demo_scene_pixels: (a: number, b: bigint, c: number, d: number, e: number) => [number, number];
    readonly demo_scene_truth: (a: number, b: bigint, c: number, d: number, e: number) => [number, number];
    readonly demo_train_detector: (a: number, b: bigint, c: number, d: number, e: number) => [number, number, number, number];
    readonly demo_train_recognizer: (a: number, b: bigint, c: number, d: number, e: number) => [number, number, number, number];
    readonly version: () => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
