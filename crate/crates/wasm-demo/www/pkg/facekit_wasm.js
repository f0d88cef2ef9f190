/* @ts-self-types="./facekit_wasm.d.ts" */

export class Demo {
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        DemoFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_demo_free(ptr, 0);
    }
    /**
     * Scans the scene with the trained cascade. Returns grouped
     * detections and the raw window count:
     * `{"raw":n,"detections":[{"x","y","w","h","neighbors"}]}`.
     * @param {bigint} seed
     * @param {number} w
     * @param {number} h
     * @param {number} face_size
     * @param {number} scale_factor
     * @param {number} min_neighbors
     * @returns {string}
     */
    detect_scene(seed, w, h, face_size, scale_factor, min_neighbors) {
        let deferred2_0;
        let deferred2_1;
        try {
            const ret = wasm.demo_detect_scene(this.__wbg_ptr, seed, w, h, face_size, scale_factor, min_neighbors);
            var ptr1 = ret[0];
            var len1 = ret[1];
            if (ret[3]) {
                ptr1 = 0; len1 = 0;
                throw takeFromExternrefTable0(ret[2]);
            }
            deferred2_0 = ptr1;
            deferred2_1 = len1;
            return getStringFromWasm0(ptr1, len1);
        } finally {
            wasm.__wbindgen_free(deferred2_0, deferred2_1, 1);
        }
    }
    /**
     * Binary view at `threshold` (pass a negative value to use Otsu),
     * scaled to 0/255 for direct display.
     * @param {number} profile
     * @param {bigint} seed
     * @param {number} size
     * @param {number} threshold
     * @returns {Uint8Array}
     */
    face_binary_pixels(profile, seed, size, threshold) {
        const ret = wasm.demo_face_binary_pixels(this.__wbg_ptr, profile, seed, size, threshold);
        var v1 = getArrayU8FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 1, 1);
        return v1;
    }
    /**
     * Gray and binary histograms of the whole face and its two halves:
     * `{"otsu":..,"threshold":..,"whole":[..256],"left":[..],"right":[..],
     *   "binary_whole":[2],"binary_left":[2],"binary_right":[2]}`.
     * @param {number} profile
     * @param {bigint} seed
     * @param {number} size
     * @param {number} threshold
     * @returns {string}
     */
    face_histograms(profile, seed, size, threshold) {
        let deferred2_0;
        let deferred2_1;
        try {
            const ret = wasm.demo_face_histograms(this.__wbg_ptr, profile, seed, size, threshold);
            var ptr1 = ret[0];
            var len1 = ret[1];
            if (ret[3]) {
                ptr1 = 0; len1 = 0;
                throw takeFromExternrefTable0(ret[2]);
            }
            deferred2_0 = ptr1;
            deferred2_1 = len1;
            return getStringFromWasm0(ptr1, len1);
        } finally {
            wasm.__wbindgen_free(deferred2_0, deferred2_1, 1);
        }
    }
    /**
     * Otsu threshold of the rendered face.
     * @param {number} profile
     * @param {bigint} seed
     * @param {number} size
     * @returns {number}
     */
    face_otsu(profile, seed, size) {
        const ret = wasm.demo_face_otsu(this.__wbg_ptr, profile, seed, size);
        return ret;
    }
    /**
     * Renders one synthetic face (profile 0..=2, anything else generic)
     * as a flat grayscale buffer.
     * @param {number} profile
     * @param {bigint} seed
     * @param {number} size
     * @returns {Uint8Array}
     */
    face_pixels(profile, seed, size) {
        const ret = wasm.demo_face_pixels(this.__wbg_ptr, profile, seed, size);
        var v1 = getArrayU8FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 1, 1);
        return v1;
    }
    /**
     * Pixels of a fresh identity scene, for drawing next to the
     * recognition verdict.
     * @param {number} profile
     * @param {bigint} seed
     * @returns {Uint8Array}
     */
    identity_scene_pixels(profile, seed) {
        const ret = wasm.demo_identity_scene_pixels(this.__wbg_ptr, profile, seed);
        var v1 = getArrayU8FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 1, 1);
        return v1;
    }
    constructor() {
        const ret = wasm.demo_new();
        this.__wbg_ptr = ret;
        DemoFinalization.register(this, this.__wbg_ptr, this);
        return this;
    }
    /**
     * Recognizes a fresh scene of the given identity profile with the
     * enrolled model: `{"truth":..,"result":"label"|"unknown","confidence":..}`.
     * @param {number} profile
     * @param {bigint} seed
     * @returns {string}
     */
    recognize_scene(profile, seed) {
        let deferred2_0;
        let deferred2_1;
        try {
            const ret = wasm.demo_recognize_scene(this.__wbg_ptr, profile, seed);
            var ptr1 = ret[0];
            var len1 = ret[1];
            if (ret[3]) {
                ptr1 = 0; len1 = 0;
                throw takeFromExternrefTable0(ret[2]);
            }
            deferred2_0 = ptr1;
            deferred2_1 = len1;
            return getStringFromWasm0(ptr1, len1);
        } finally {
            wasm.__wbindgen_free(deferred2_0, deferred2_1, 1);
        }
    }
    /**
     * A scene with one planted face, as flat grayscale pixels.
     * @param {bigint} seed
     * @param {number} w
     * @param {number} h
     * @param {number} face_size
     * @returns {Uint8Array}
     */
    scene_pixels(seed, w, h, face_size) {
        const ret = wasm.demo_scene_pixels(this.__wbg_ptr, seed, w, h, face_size);
        var v1 = getArrayU8FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 1, 1);
        return v1;
    }
    /**
     * Ground-truth rectangle of the planted face: `{"x":..,"y":..,"w":..,"h":..}`.
     * @param {bigint} seed
     * @param {number} w
     * @param {number} h
     * @param {number} face_size
     * @returns {string}
     */
    scene_truth(seed, w, h, face_size) {
        let deferred1_0;
        let deferred1_1;
        try {
            const ret = wasm.demo_scene_truth(this.__wbg_ptr, seed, w, h, face_size);
            deferred1_0 = ret[0];
            deferred1_1 = ret[1];
            return getStringFromWasm0(ret[0], ret[1]);
        } finally {
            wasm.__wbindgen_free(deferred1_0, deferred1_1, 1);
        }
    }
    /**
     * Trains a small cascade on the jittered synthetic corpus and keeps
     * it for scanning. Returns the per-stage training report.
     * @param {bigint} seed
     * @param {number} max_stages
     * @param {number} n_pos
     * @param {number} n_neg
     * @returns {string}
     */
    train_detector(seed, max_stages, n_pos, n_neg) {
        let deferred2_0;
        let deferred2_1;
        try {
            const ret = wasm.demo_train_detector(this.__wbg_ptr, seed, max_stages, n_pos, n_neg);
            var ptr1 = ret[0];
            var len1 = ret[1];
            if (ret[3]) {
                ptr1 = 0; len1 = 0;
                throw takeFromExternrefTable0(ret[2]);
            }
            deferred2_0 = ptr1;
            deferred2_1 = len1;
            return getStringFromWasm0(ptr1, len1);
        } finally {
            wasm.__wbindgen_free(deferred2_0, deferred2_1, 1);
        }
    }
    /**
     * Enrolls a synthetic three-identity corpus (using the trained
     * detector, or a freshly trained one) and evaluates held-out images.
     * Returns training curves and evaluation statistics.
     * @param {bigint} seed
     * @param {number} per_identity
     * @param {number} max_epochs
     * @param {number} restarts
     * @returns {string}
     */
    train_recognizer(seed, per_identity, max_epochs, restarts) {
        let deferred2_0;
        let deferred2_1;
        try {
            const ret = wasm.demo_train_recognizer(this.__wbg_ptr, seed, per_identity, max_epochs, restarts);
            var ptr1 = ret[0];
            var len1 = ret[1];
            if (ret[3]) {
                ptr1 = 0; len1 = 0;
                throw takeFromExternrefTable0(ret[2]);
            }
            deferred2_0 = ptr1;
            deferred2_1 = len1;
            return getStringFromWasm0(ptr1, len1);
        } finally {
            wasm.__wbindgen_free(deferred2_0, deferred2_1, 1);
        }
    }
}
if (Symbol.dispose) Demo.prototype[Symbol.dispose] = Demo.prototype.free;

/**
 * Crate version string for the page footer.
 * @returns {string}
 */
export function version() {
    let deferred1_0;
    let deferred1_1;
    try {
        const ret = wasm.version();
        deferred1_0 = ret[0];
        deferred1_1 = ret[1];
        return getStringFromWasm0(ret[0], ret[1]);
    } finally {
        wasm.__wbindgen_free(deferred1_0, deferred1_1, 1);
    }
}
function __wbg_get_imports() {
    const import0 = {
        __proto__: null,
        __wbg___wbindgen_throw_bb96b2010945f0bc: function(arg0, arg1) {
            throw new Error(getStringFromWasm0(arg0, arg1));
        },
        __wbindgen_cast_0000000000000001: function(arg0, arg1) {
            // Cast intrinsic for `Ref(String) -> Externref`.
            const ret = getStringFromWasm0(arg0, arg1);
            return ret;
        },
        __wbindgen_init_externref_table: function() {
            const table = wasm.__wbindgen_externrefs;
            const offset = table.grow(4);
            table.set(0, undefined);
            table.set(offset + 0, undefined);
            table.set(offset + 1, null);
            table.set(offset + 2, true);
            table.set(offset + 3, false);
        },
    };
    return {
        __proto__: null,
        "./facekit_wasm_bg.js": import0,
    };
}

const DemoFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_demo_free(ptr, 1));

function getArrayU8FromWasm0(ptr, len) {
    ptr = ptr >>> 0;
    return getUint8ArrayMemory0().subarray(ptr / 1, ptr / 1 + len);
}

function getStringFromWasm0(ptr, len) {
    return decodeText(ptr >>> 0, len);
}

let cachedUint8ArrayMemory0 = null;
function getUint8ArrayMemory0() {
    if (cachedUint8ArrayMemory0 === null || cachedUint8ArrayMemory0.byteLength === 0) {
        cachedUint8ArrayMemory0 = new Uint8Array(wasm.memory.buffer);
    }
    return cachedUint8ArrayMemory0;
}

function takeFromExternrefTable0(idx) {
    const value = wasm.__wbindgen_externrefs.get(idx);
    wasm.__externref_table_dealloc(idx);
    return value;
}

let cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
cachedTextDecoder.decode();
const MAX_SAFARI_DECODE_BYTES = 2146435072;
let numBytesDecoded = 0;
function decodeText(ptr, len) {
    numBytesDecoded += len;
    if (numBytesDecoded >= MAX_SAFARI_DECODE_BYTES) {
        cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
        cachedTextDecoder.decode();
        numBytesDecoded = len;
    }
    return cachedTextDecoder.decode(getUint8ArrayMemory0().subarray(ptr, ptr + len));
}

let wasmModule, wasmInstance, wasm;
function __wbg_finalize_init(instance, module) {
    wasmInstance = instance;
    wasm = instance.exports;
    wasmModule = module;
    cachedUint8ArrayMemory0 = null;
    wasm.__wbindgen_start();
    return wasm;
}

async function __wbg_load(module, imports) {
    if (typeof Response === 'function' && module instanceof Response) {
        if (!module.ok) {
            throw new Error(`failed to fetch Wasm: ${module.status} ${module.statusText} fetching '${module.url}'`);
        }

        if (typeof WebAssembly.instantiateStreaming === 'function') {
            try {
                return await WebAssembly.instantiateStreaming(module, imports);
            } catch (e) {
                const validResponse = expectedResponseType(module.type);

                if (validResponse && module.headers.get('Content-Type') !== 'application/wasm') {
                    console.warn("`WebAssembly.instantiateStreaming` failed because your server does not serve Wasm with `application/wasm` MIME type. Falling back to `WebAssembly.instantiate` which is slower. Original error:\n", e);

                } else { throw e; }
            }
        }

        const bytes = await module.arrayBuffer();
        return await WebAssembly.instantiate(bytes, imports);
    } else {
        const instance = await WebAssembly.instantiate(module, imports);

        if (instance instanceof WebAssembly.Instance) {
            return { instance, module };
        } else {
            return instance;
        }
    }

    function expectedResponseType(type) {
        switch (type) {
            case 'basic': case 'cors': case 'default': return true;
        }
        return false;
    }
}

function initSync(module) {
    if (wasm !== undefined) return wasm;


    if (module !== undefined) {
        if (Object.getPrototypeOf(module) === Object.prototype) {
            ({module} = module)
        } else {
            console.warn('using deprecated parameters for `initSync()`; pass a single object instead')
        }
    }

    const imports = __wbg_get_imports();
    if (!(module instanceof WebAssembly.Module)) {
        module = new WebAssembly.Module(module);
    }
    const instance = new WebAssembly.Instance(module, imports);
    return __wbg_finalize_init(instance, module);
}

async function __wbg_init(module_or_path) {
    if (wasm !== undefined) return wasm;


    if (module_or_path !== undefined) {
        if (Object.getPrototypeOf(module_or_path) === Object.prototype) {
            ({module_or_path} = module_or_path)
        } else {
            console.warn('using deprecated parameters for the initialization function; pass a single object instead')
        }
    }

    if (module_or_path === undefined) {
        module_or_path = new URL('facekit_wasm_bg.wasm', import.meta.url);
    }
    const imports = __wbg_get_imports();

    if (typeof module_or_path === 'string' || (typeof Request === 'function' && module_or_path instanceof Request) || (typeof URL === 'function' && module_or_path instanceof URL)) {
        module_or_path = fetch(module_or_path);
    }

    const { instance, module } = await __wbg_load(await module_or_path, imports);

    return __wbg_finalize_init(instance, module);
}

export { initSync, __wbg_init as default };
