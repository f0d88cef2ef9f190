/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_demo_free: (a: number, b: number) => void;
export const demo_detect_scene: (a: number, b: bigint, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
export const demo_face_binary_pixels: (a: number, b: number, c: bigint, d: number, e: number) => [number, number];
export const demo_face_histograms: (a: number, b: number, c: bigint, d: number, e: number) => [number, number, number, number];
export const demo_face_otsu: (a: number, b: number, c: bigint, d: number) => number;
export const demo_face_pixels: (a: number, b: number, c: bigint, d: number) => [number, number];
export const demo_identity_scene_pixels: (a: number, b: number, c: bigint) => [number, number];
export const demo_new: () => number;
export const demo_recognize_scene: (a: number, b: number, c: bigint) => [number, number, number, number];
export const demo_scene_pixels: (a: number, b: bigint, c: number, d: number, e: number) => [number, number];
export const demo_scene_truth: (a: number, b: bigint, c: number, d: number, e: number) => [number, number];
export const demo_train_detector: (a: number, b: bigint, c: number, d: number, e: number) => [number, number, number, number];
export const demo_train_recognizer: (a: number, b: bigint, c: number, d: number, e: number) => [number, number, number, number];
export const version: () => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
