/** Typed client for the annotation service endpoints. */
export class ApiError extends Error {
    constructor(status, detail) {
        super(detail);
        this.status = status;
        this.name = "ApiError";
    }
}
async function detailOf(response) {
    try {
        const body = await response.json();
        if (typeof body?.detail === "string")
            return body.detail;
        return JSON.stringify(body);
    }
    catch {
        return response.statusText;
    }
}
export class ApiClient {
    constructor(baseUrl = "", fetchImpl = (input, init) => fetch(input, init)) {
        this.baseUrl = baseUrl;
        this.fetchImpl = fetchImpl;
    }
    async request(path, init) {
        // a thrown TypeError here means "network down"; callers rely on that
        const response = await this.fetchImpl(this.baseUrl + path, init);
        return response;
    }
    async getManifest() {
        const response = await this.request("/api/manifest");
        if (!response.ok)
            throw new ApiError(response.status, await detailOf(response));
        return (await response.json());
    }
    async getUnlabeledTerms(raterId) {
        const response = await this.request(`/api/terms?rater=${encodeURIComponent(raterId)}`);
        if (!response.ok)
            throw new ApiError(response.status, await detailOf(response));
        const body = await response.json();
        return body.terms;
    }
    /** Resolves to "ok" or "duplicate"; rejects with ApiError on 4xx. */
    async postLabel(record) {
        const response = await this.request("/api/labels", {
            method: "POST",
            headers: { "content-type": "application/json" },
            body: JSON.stringify(record),
        });
        if (!response.ok)
            throw new ApiError(response.status, await detailOf(response));
        const body = await response.json();
        return body.status;
    }
    async getLabels(raterId) {
        const response = await this.request(`/api/labels?rater=${encodeURIComponent(raterId)}`);
        if (!response.ok)
            throw new ApiError(response.status, await detailOf(response));
        const body = await response.json();
        return body.records;
    }
    async getProgress() {
        const response = await this.request("/api/progress");
        if (!response.ok)
            throw new ApiError(response.status, await detailOf(response));
        return (await response.json());
    }
    async getAgreement(mapping, subsetSize) {
        let path = `/api/agreement?mapping=${encodeURIComponent(mapping)}`;
        if (subsetSize !== undefined)
            path += `&subset_size=${subsetSize}`;
        const response = await this.request(path);
        if (response.status === 409) {
            const body = await response.json();
            return { status: "incomplete", total: body.total, raters: body.raters };
        }
        if (!response.ok)
            throw new ApiError(response.status, await detailOf(response));
        const result = (await response.json());
        return { status: "ok", result };
    }
}
