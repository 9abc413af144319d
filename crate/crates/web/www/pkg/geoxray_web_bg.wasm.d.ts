/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_fbpresult_free: (a: number, b: number) => void;
export const __wbg_image_free: (a: number, b: number) => void;
export const fbp_demo: (a: number, b: number) => [number, number, number];
export const fbpresult_phantom: (a: number) => number;
export const fbpresult_recon: (a: number) => number;
export const fbpresult_rel_error: (a: number) => number;
export const fbpresult_sinogram: (a: number) => number;
export const geodesic_fan: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const image_data: (a: number) => [number, number];
export const image_height: (a: number) => number;
export const image_width: (a: number) => number;
export const xray_fan: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
